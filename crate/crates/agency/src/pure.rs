//! Optimal pure contracts, the value-axis upper envelope with its transition
//! points, the observable-actions benchmark, and the price of
//! unaccountability.
//!
//! For a fixed agent set `S` the principal's utility is linear in the value
//! `v`, so the optimum over all `2^n` sets is the upper envelope of `2^n`
//! lines. The envelope is built once by slope sorting and intersection
//! pruning; `solve_pure` stays the independent per-value enumeration.

use crate::scalar::{lit, Scalar};
use crate::technology::{AgentSet, Technology};

/// Breakpoint agreement tolerance, scaled by `1 + v`.
pub const TOL_ENVELOPE: f64 = 1e-9;

/// Tolerance for Nash verification of pure contracts.
pub const TOL_NASH: f64 = 1e-9;

/// A pure contract: the exerting set, its success-contingent payments and
/// the principal's utility at the queried value.
#[derive(Clone, Debug)]
pub struct PureContract<T> {
    pub set: AgentSet,
    /// Per-agent payment on success; zero outside `set`.
    pub payments: Vec<T>,
    pub utility: T,
}

/// Minimal payment inducing `i` to exert effort within `S`:
/// `c_i / (t(S) - t(S \ {i}))`.
pub fn payment_pure<T: Scalar>(tech: &Technology<T>, s: AgentSet, i: usize) -> T {
    assert!(s.contains(i), "agent {} not in {s}", i + 1);
    tech.cost(i) / (tech.eval_pure(s) - tech.eval_pure(s.without(i)))
}

/// Total success payment of the pure contract `S`.
pub fn total_payment_pure<T: Scalar>(tech: &Technology<T>, s: AgentSet) -> T {
    let mut total = T::zero();
    for i in s.iter() {
        total = total + payment_pure(tech, s, i);
    }
    total
}

/// Principal utility of inducing exactly the set `S` at value `v`.
pub fn utility_pure<T: Scalar>(tech: &Technology<T>, s: AgentSet, v: T) -> T {
    tech.eval_pure(s) * (v - total_payment_pure(tech, s))
}

/// Enumerates all `2^n` sets and returns the maximizer of [`utility_pure`].
/// Ties go to the smaller set, then the smaller bitmask.
pub fn solve_pure<T: Scalar>(tech: &Technology<T>, v: T) -> PureContract<T> {
    let mut best: Option<(AgentSet, T)> = None;
    for mask in 0..1u32 << tech.n() {
        let s = AgentSet(mask);
        let u = utility_pure(tech, s, v.clone());
        let better = match &best {
            None => true,
            Some((bs, bu)) => u > *bu || (u == *bu && (s.len(), s.0) < (bs.len(), bs.0)),
        };
        if better {
            best = Some((s, u));
        }
    }
    let (set, utility) = best.expect("at least the empty contract exists");
    PureContract { set, payments: payments_for(tech, set), utility }
}

fn payments_for<T: Scalar>(tech: &Technology<T>, s: AgentSet) -> Vec<T> {
    (0..tech.n())
        .map(|i| if s.contains(i) { payment_pure(tech, s, i) } else { T::zero() })
        .collect()
}

/// One linear piece of an envelope: utility `slope * v + intercept` achieved
/// by contracting `set`.
#[derive(Clone, Debug)]
pub struct EnvelopePiece<T> {
    pub set: AgentSet,
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> EnvelopePiece<T> {
    pub fn utility_at(&self, v: T) -> T {
        self.slope.clone() * v + self.intercept.clone()
    }
}

/// Upper envelope over the value axis: `pieces[k]` is optimal on
/// `[breakpoints[k-1], breakpoints[k]]`, with the first piece starting at 0
/// and the last unbounded.
#[derive(Clone, Debug)]
pub struct Envelope<T> {
    pub breakpoints: Vec<T>,
    pub pieces: Vec<EnvelopePiece<T>>,
}

impl<T: Scalar> Envelope<T> {
    /// The piece whose interval contains `v` (the right piece at breakpoints).
    pub fn piece_at(&self, v: &T) -> &EnvelopePiece<T> {
        let idx = self.breakpoints.iter().take_while(|b| **b <= *v).count();
        &self.pieces[idx]
    }

    pub fn utility_at(&self, v: T) -> T {
        self.piece_at(&v).utility_at(v)
    }

    /// The optimal set at `v`.
    pub fn set_at(&self, v: &T) -> AgentSet {
        self.piece_at(v).set
    }
}

fn upper_envelope<T: Scalar>(mut lines: Vec<EnvelopePiece<T>>) -> Envelope<T> {
    // sort by slope; among equal slopes keep the highest intercept, with the
    // contract tie rule (smaller set, then smaller bitmask) for exact ties
    lines.sort_by(|a, b| {
        a.slope
            .partial_cmp(&b.slope)
            .unwrap()
            .then(b.intercept.partial_cmp(&a.intercept).unwrap())
            .then((a.set.len(), a.set.0).cmp(&(b.set.len(), b.set.0)))
    });
    lines.dedup_by(|next, kept| next.slope == kept.slope);

    // x-coordinate where `a` and `b` (slope_a < slope_b) cross
    let crossing = |a: &EnvelopePiece<T>, b: &EnvelopePiece<T>| -> T {
        (a.intercept.clone() - b.intercept.clone()) / (b.slope.clone() - a.slope.clone())
    };

    let mut hull: Vec<EnvelopePiece<T>> = Vec::new();
    for line in lines {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let top = &hull[hull.len() - 1];
            // `top` never wins if the new line overtakes `a` no later than
            // `top` does
            if crossing(a, &line) <= crossing(a, top) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }

    let mut breakpoints: Vec<T> = Vec::with_capacity(hull.len().saturating_sub(1));
    for w in hull.windows(2) {
        breakpoints.push(crossing(&w[0], &w[1]));
    }

    // clip pieces that end at or before v = 0
    let mut start = 0;
    while start < breakpoints.len() && breakpoints[start] <= T::zero() {
        start += 1;
    }
    let env =
        Envelope { breakpoints: breakpoints.split_off(start), pieces: hull.split_off(start) };
    debug_assert_eq!(env.pieces.len(), env.breakpoints.len() + 1);
    debug_assert!(env.pieces.windows(2).all(|w| w[0].set != w[1].set));
    env
}

/// Exact upper envelope of the hidden-action pure contracts.
pub fn pure_envelope<T: Scalar>(tech: &Technology<T>) -> Envelope<T> {
    let lines = (0..1u32 << tech.n())
        .map(|mask| {
            let s = AgentSet(mask);
            let t = tech.eval_pure(s);
            let intercept = T::zero() - t.clone() * total_payment_pure(tech, s);
            EnvelopePiece { set: s, slope: t, intercept }
        })
        .collect();
    upper_envelope(lines)
}

/// Values at which the optimal pure contract changes.
pub fn transition_points<T: Scalar>(tech: &Technology<T>) -> Vec<T> {
    pure_envelope(tech).breakpoints
}

/// Observable-actions optimum: agents are paid their cost directly, so the
/// principal maximizes `t(S) * v - sum of costs`.
pub fn solve_observable<T: Scalar>(tech: &Technology<T>, v: T) -> (AgentSet, T) {
    let mut best: Option<(AgentSet, T)> = None;
    for mask in 0..1u32 << tech.n() {
        let s = AgentSet(mask);
        let mut costs = T::zero();
        for i in s.iter() {
            costs = costs + tech.cost(i);
        }
        let u = tech.eval_pure(s) * v.clone() - costs;
        let better = match &best {
            None => true,
            Some((bs, bu)) => u > *bu || (u == *bu && (s.len(), s.0) < (bs.len(), bs.0)),
        };
        if better {
            best = Some((s, u));
        }
    }
    best.expect("nonempty enumeration")
}

/// Envelope of the observable-actions case.
pub fn observable_envelope<T: Scalar>(tech: &Technology<T>) -> Envelope<T> {
    let lines = (0..1u32 << tech.n())
        .map(|mask| {
            let s = AgentSet(mask);
            let mut costs = T::zero();
            for i in s.iter() {
                costs = costs + tech.cost(i);
            }
            EnvelopePiece { set: s, slope: tech.eval_pure(s), intercept: T::zero() - costs }
        })
        .collect();
    upper_envelope(lines)
}

/// Price-of-unaccountability result: the supremum ratio and where it is
/// attained.
#[derive(Clone, Debug)]
pub struct PouResult<T> {
    pub value: T,
    pub witness_v: T,
}

/// The worst ratio, over `v`, of the observable-actions optimum to the
/// hidden-actions pure optimum.
///
/// Both optima are piecewise linear in `v`, so the ratio is monotone between
/// the merged breakpoints of the two envelopes and the supremum is attained
/// at one of them (the ratio tends to 1 at both ends of the axis).
pub fn pou<T: Scalar>(tech: &Technology<T>) -> PouResult<T> {
    let hidden = pure_envelope(tech);
    let observable = observable_envelope(tech);
    let mut points: Vec<T> = hidden
        .breakpoints
        .iter()
        .chain(observable.breakpoints.iter())
        .cloned()
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    let mut best = PouResult {
        value: T::one(),
        witness_v: points.first().cloned().unwrap_or_else(T::one),
    };
    for v in points {
        let num = observable.utility_at(v.clone());
        let den = hidden.utility_at(v.clone());
        if den > T::zero() {
            let ratio = num / den;
            if ratio > best.value {
                best = PouResult { value: ratio, witness_v: v };
            }
        }
    }
    best
}

/// Nash check for a pure profile `S` under arbitrary nonnegative payments:
/// members must weakly prefer effort, outsiders must weakly prefer shirking.
pub fn verify_pure_nash<T: Scalar>(tech: &Technology<T>, s: AgentSet, payments: &[T]) -> bool {
    assert_eq!(payments.len(), tech.n());
    let tol: T = lit(TOL_NASH);
    for i in 0..tech.n() {
        let delta = tech.marginal_set(i, s);
        let gain = payments[i].clone() * delta;
        if s.contains(i) {
            if gain < tech.cost(i) - tol.clone() {
                return false;
            }
        } else if gain > tech.cost(i) + tol.clone() {
            return false;
        }
    }
    true
}
