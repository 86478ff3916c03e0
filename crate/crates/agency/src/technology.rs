//! Technologies: success tables over effort profiles, their mixed-strategy
//! extension, and structural classification.
//!
//! A technology is a pair `(t, c)` — a success probability for each of the
//! `2^n` pure effort profiles plus a positive effort cost per agent. Profiles
//! are bitmasks with agent 1 at the least significant bit. Every table entry
//! must be in `(0, 1]` and exerting effort must strictly increase the success
//! probability no matter what the other agents do.

use std::fmt;

use crate::scalar::{lit, Scalar};

/// Hard cap on the agent count; tables are dense with `2^n` entries.
pub const MAX_AGENTS: usize = 20;

/// Equality tolerance for returns classification and anonymity detection.
pub const TOL_EQ: f64 = 1e-12;

/// Required margin for the strict-monotonicity check.
pub const TOL_MONOTONE: f64 = 1e-12;

/// A set of agents encoded as a bitmask (agent index `i` at bit `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AgentSet(pub u32);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub fn full(n: usize) -> Self {
        AgentSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        AgentSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        AgentSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        AgentSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: AgentSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Agent indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.contains(*i))
    }

    /// All subsets of this set, in ascending bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = AgentSet> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some(cur.wrapping_sub(full) & full) };
            Some(AgentSet(cur))
        })
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// One violated technology invariant, with the witnessing profile.
#[derive(Clone, Debug)]
pub enum Violation {
    NoAgents,
    TooManyAgents { n: usize },
    TableSize { expected: usize, got: usize },
    NonPositiveCost { agent: usize, value: String },
    NonPositiveProbability { profile: AgentSet, value: String },
    ProbabilityAboveOne { profile: AgentSet, value: String },
    NonStrictMonotonicity { agent: usize, others: AgentSet, low: String, high: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAgents => write!(f, "technology must have at least one agent"),
            Violation::TooManyAgents { n } => {
                write!(f, "{n} agents exceed the supported maximum of {MAX_AGENTS}")
            }
            Violation::TableSize { expected, got } => {
                write!(f, "success table must have {expected} entries, got {got}")
            }
            Violation::NonPositiveCost { agent, value } => {
                write!(f, "agent {} has non-positive cost {value}", agent + 1)
            }
            Violation::NonPositiveProbability { profile, value } => {
                write!(f, "zero success probability: t{profile} = {value} must be > 0")
            }
            Violation::ProbabilityAboveOne { profile, value } => {
                write!(f, "t{profile} = {value} exceeds 1")
            }
            Violation::NonStrictMonotonicity { agent, others, low, high } => write!(
                f,
                "non-strict monotonicity: agent {} at others {others}: t(1,..)={high} vs t(0,..)={low}",
                agent + 1
            ),
        }
    }
}

/// Validation outcome listing every violated invariant.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid technology:")?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Success function plus per-agent effort costs.
#[derive(Clone, Debug, PartialEq)]
pub struct Technology<T> {
    n: usize,
    costs: Vec<T>,
    table: Vec<T>,
}

impl<T: Scalar> Technology<T> {
    /// Builds and validates a technology. The table is in bitmask order with
    /// agent 1 at the least significant bit.
    pub fn new(costs: Vec<T>, table: Vec<T>) -> Result<Self, ValidationReport> {
        let tech = Technology { n: costs.len(), costs, table };
        tech.validate()?;
        Ok(tech)
    }

    /// Re-checks every invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::NoAgents);
        }
        if self.n > MAX_AGENTS {
            violations.push(Violation::TooManyAgents { n: self.n });
            return Err(ValidationReport { violations });
        }
        let expected = 1usize << self.n;
        if self.table.len() != expected {
            violations.push(Violation::TableSize { expected, got: self.table.len() });
            return Err(ValidationReport { violations });
        }
        for (i, c) in self.costs.iter().enumerate() {
            if !(*c > T::zero()) {
                violations.push(Violation::NonPositiveCost { agent: i, value: format!("{c}") });
            }
        }
        for (mask, t) in self.table.iter().enumerate() {
            if !(*t > T::zero()) {
                violations.push(Violation::NonPositiveProbability {
                    profile: AgentSet(mask as u32),
                    value: format!("{t}"),
                });
            } else if *t > T::one() {
                violations.push(Violation::ProbabilityAboveOne {
                    profile: AgentSet(mask as u32),
                    value: format!("{t}"),
                });
            }
        }
        let margin: T = lit(TOL_MONOTONE);
        for i in 0..self.n {
            let bit = 1usize << i;
            for mask in 0..expected {
                if mask & bit != 0 {
                    continue;
                }
                let low = &self.table[mask];
                let high = &self.table[mask | bit];
                if !(high.clone() - low.clone() > margin) {
                    violations.push(Violation::NonStrictMonotonicity {
                        agent: i,
                        others: AgentSet(mask as u32),
                        low: format!("{low}"),
                        high: format!("{high}"),
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn costs(&self) -> &[T] {
        &self.costs
    }

    pub fn cost(&self, i: usize) -> T {
        self.costs[i].clone()
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// True when all costs are equal within [`TOL_EQ`].
    pub fn identical_costs(&self) -> bool {
        let tol: T = lit(TOL_EQ);
        self.costs.iter().all(|c| abs_diff(c.clone(), self.costs[0].clone()) <= tol)
    }

    /// Success probability of a pure profile.
    pub fn eval_pure(&self, a: AgentSet) -> T {
        assert!((a.0 as usize) < self.table.len(), "profile {a:?} out of range for n={}", self.n);
        self.table[a.0 as usize].clone()
    }

    /// Success probability of a mixed profile (the multilinear extension).
    ///
    /// Computed by contracting one agent at a time, which agrees with the
    /// full `2^n` expectation and is exact on degenerate profiles.
    pub fn eval_mixed(&self, q: &MixedProfile<T>) -> T {
        assert_eq!(q.len(), self.n);
        let mut buf = self.table.clone();
        let mut len = buf.len();
        for i in (0..self.n).rev() {
            len /= 2;
            contract_top(&mut buf, len, q.get(i));
        }
        buf[0].clone()
    }

    /// Marginal contribution `Δ_i(q_{-i}) = t(1, q_{-i}) - t(0, q_{-i})`.
    /// The profile's own `q_i` is ignored.
    pub fn marginal(&self, i: usize, q: &MixedProfile<T>) -> T {
        let (t0, t1) = self.own_action_pair(i, q);
        t1 - t0
    }

    /// `(t(0, q_{-i}), t(1, q_{-i}))` for agent `i`.
    pub fn own_action_pair(&self, i: usize, q: &MixedProfile<T>) -> (T, T) {
        assert_eq!(q.len(), self.n);
        assert!(i < self.n);
        let mut buf = self.table.clone();
        let mut len = buf.len();
        for j in (i + 1..self.n).rev() {
            len /= 2;
            contract_top(&mut buf, len, q.get(j));
        }
        for j in 0..i {
            len /= 2;
            contract_bottom(&mut buf, len, q.get(j));
        }
        debug_assert_eq!(len, 2);
        (buf[0].clone(), buf[1].clone())
    }

    /// Pure marginal `Δ_i(T) = t(T ∪ {i}) - t(T \ {i})`.
    pub fn marginal_set(&self, i: usize, others: AgentSet) -> T {
        let lo = others.without(i);
        self.eval_pure(lo.with(i)) - self.eval_pure(lo)
    }

    /// Exhaustive returns-to-scale classification over all ordered pairs of
    /// comparable profiles, with equality tolerance [`TOL_EQ`].
    pub fn classify_returns(&self) -> ReturnsClassification<T> {
        let tol: T = lit(TOL_EQ);
        let size = 1usize << self.n;
        let mut irs_witness: Option<ReturnsWitness<T>> = None;
        let mut drs_witness: Option<ReturnsWitness<T>> = None;
        'outer: for i in 0..self.n {
            let bit = 1u32 << i;
            for high in 0..size as u32 {
                if high & bit != 0 {
                    continue;
                }
                let d_high = self.marginal_set(i, AgentSet(high));
                // all proper submasks of `high`
                let mut low = high;
                loop {
                    if low == 0 {
                        break;
                    }
                    low = (low - 1) & high;
                    let d_low = self.marginal_set(i, AgentSet(low));
                    let witness = || ReturnsWitness {
                        agent: i,
                        low_others: AgentSet(low),
                        high_others: AgentSet(high),
                        low_delta: d_low.clone(),
                        high_delta: d_high.clone(),
                    };
                    if irs_witness.is_none() && d_high.clone() + tol.clone() < d_low {
                        irs_witness = Some(witness());
                    } else if drs_witness.is_none() && d_high > d_low.clone() + tol.clone() {
                        drs_witness = Some(witness());
                    }
                    if irs_witness.is_some() && drs_witness.is_some() {
                        break 'outer;
                    }
                    if low == 0 {
                        break;
                    }
                }
            }
        }
        let class = match (&irs_witness, &drs_witness) {
            (None, None) => ReturnsClass::Both,
            (None, Some(_)) => ReturnsClass::Irs,
            (Some(_), None) => ReturnsClass::Drs,
            (Some(_), Some(_)) => ReturnsClass::Neither,
        };
        ReturnsClassification { class, irs_witness, drs_witness }
    }

    /// For anonymous technologies (success depends only on how many agents
    /// exert effort, identical costs) returns the count-indexed success
    /// levels `t_0..t_n`; `None` otherwise.
    pub fn as_anonymous(&self) -> Option<Vec<T>> {
        if !self.identical_costs() {
            return None;
        }
        let tol: T = lit(TOL_EQ);
        let mut levels: Vec<Option<T>> = vec![None; self.n + 1];
        for mask in 0..self.table.len() {
            let m = (mask as u32).count_ones() as usize;
            match &levels[m] {
                None => levels[m] = Some(self.table[mask].clone()),
                Some(reference) => {
                    if abs_diff(reference.clone(), self.table[mask].clone()) > tol {
                        return None;
                    }
                }
            }
        }
        Some(levels.into_iter().map(|l| l.unwrap()).collect())
    }

    /// The `|S|`-agent technology with all agents outside `S` pinned to zero
    /// effort. Invariants are re-checked on the result.
    pub fn restrict_support(&self, s: AgentSet) -> Result<Technology<T>, ValidationReport> {
        assert!(!s.is_empty(), "support must be nonempty");
        assert!(s.is_subset_of(AgentSet::full(self.n)));
        let members: Vec<usize> = s.iter().collect();
        let k = members.len();
        let mut table = Vec::with_capacity(1 << k);
        for sub in 0..1u32 << k {
            let mut full = 0u32;
            for (j, agent) in members.iter().enumerate() {
                if sub >> j & 1 == 1 {
                    full |= 1 << agent;
                }
            }
            table.push(self.table[full as usize].clone());
        }
        let costs = members.iter().map(|i| self.costs[*i].clone()).collect();
        Technology::new(costs, table)
    }
}

/// Contracts the top agent of a `2*len`-entry table in place:
/// `buf[j] = (1-q)*buf[j] + q*buf[j+len]`.
fn contract_top<T: Scalar>(buf: &mut [T], len: usize, q: T) {
    let co = T::one() - q.clone();
    for j in 0..len {
        buf[j] = co.clone() * buf[j].clone() + q.clone() * buf[j + len].clone();
    }
}

/// Contracts the bottom agent: `buf[j] = (1-q)*buf[2j] + q*buf[2j+1]`.
fn contract_bottom<T: Scalar>(buf: &mut [T], len: usize, q: T) {
    let co = T::one() - q.clone();
    for j in 0..len {
        buf[j] = co.clone() * buf[2 * j].clone() + q.clone() * buf[2 * j + 1].clone();
    }
}

pub(crate) fn abs_diff<T: Scalar>(a: T, b: T) -> T {
    if a < b {
        b - a
    } else {
        a - b
    }
}

/// Effort probability per agent, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile<T> {
    q: Vec<T>,
}

/// Error for a profile entry outside `[0, 1]`.
#[derive(Clone, Debug, thiserror::Error)]
#[error("agent {} has effort probability {value} outside [0, 1]", agent + 1)]
pub struct ProfileError {
    pub agent: usize,
    pub value: String,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn new(q: Vec<T>) -> Result<Self, ProfileError> {
        for (i, qi) in q.iter().enumerate() {
            if *qi < T::zero() || *qi > T::one() {
                return Err(ProfileError { agent: i, value: format!("{qi}") });
            }
        }
        Ok(MixedProfile { q })
    }

    /// Degenerate profile: effort with probability 1 exactly on `s`.
    pub fn pure(s: AgentSet, n: usize) -> Self {
        MixedProfile {
            q: (0..n).map(|i| if s.contains(i) { T::one() } else { T::zero() }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.q[i].clone()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.q
    }

    /// Agents with strictly positive effort probability.
    pub fn support(&self) -> AgentSet {
        let mut s = AgentSet::EMPTY;
        for (i, qi) in self.q.iter().enumerate() {
            if *qi > T::zero() {
                s = s.with(i);
            }
        }
        s
    }

    /// Agents mixing strictly between effort and shirking.
    pub fn strict_mixers(&self) -> AgentSet {
        let mut s = AgentSet::EMPTY;
        for (i, qi) in self.q.iter().enumerate() {
            if *qi > T::zero() && *qi < T::one() {
                s = s.with(i);
            }
        }
        s
    }

    /// True when every probability is exactly 0 or 1.
    pub fn is_degenerate(&self) -> bool {
        self.q.iter().all(|qi| *qi == T::zero() || *qi == T::one())
    }
}

/// Returns-to-scale class of a success function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnsClass {
    /// Increasing returns to scale (super-modular).
    Irs,
    /// Decreasing returns to scale (sub-modular).
    Drs,
    /// Modular: all marginal comparisons hold with equality.
    Both,
    Neither,
}

impl fmt::Display for ReturnsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReturnsClass::Irs => write!(f, "IRS"),
            ReturnsClass::Drs => write!(f, "DRS"),
            ReturnsClass::Both => write!(f, "BOTH"),
            ReturnsClass::Neither => write!(f, "NEITHER"),
        }
    }
}

/// A comparable profile pair violating one side of the classification.
#[derive(Clone, Debug)]
pub struct ReturnsWitness<T> {
    pub agent: usize,
    pub low_others: AgentSet,
    pub high_others: AgentSet,
    pub low_delta: T,
    pub high_delta: T,
}

/// Classification outcome plus the witnesses for whichever sides fail.
#[derive(Clone, Debug)]
pub struct ReturnsClassification<T> {
    pub class: ReturnsClass,
    /// Present when the IRS inequality fails somewhere.
    pub irs_witness: Option<ReturnsWitness<T>>,
    /// Present when the DRS inequality fails somewhere.
    pub drs_witness: Option<ReturnsWitness<T>>,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// OR technology table from the closed form 1 - prod of failure probs.
    pub(crate) fn or_table(gammas: &[f64], deltas: &[f64]) -> Vec<f64> {
        let n = gammas.len();
        (0..1u32 << n)
            .map(|mask| {
                let mut fail = 1.0;
                for i in 0..n {
                    fail *= if mask >> i & 1 == 1 { 1.0 - deltas[i] } else { 1.0 - gammas[i] };
                }
                1.0 - fail
            })
            .collect()
    }

    pub(crate) fn and_table(gammas: &[f64], deltas: &[f64]) -> Vec<f64> {
        let n = gammas.len();
        (0..1u32 << n)
            .map(|mask| {
                let mut p = 1.0;
                for i in 0..n {
                    p *= if mask >> i & 1 == 1 { deltas[i] } else { gammas[i] };
                }
                p
            })
            .collect()
    }

    /// The anonymous OR technology of Example 3.1 (gamma 0.09, delta 0.91).
    pub(crate) fn example_31() -> Technology<f64> {
        Technology::new(vec![1.0, 1.0], or_table(&[0.09, 0.09], &[0.91, 0.91])).unwrap()
    }

    pub(crate) fn random_technology(rng: &mut ChaCha8Rng, n: usize) -> Technology<f64> {
        let size = 1usize << n;
        let mut table = vec![0.0f64; size];
        table[0] = rng.gen_range(0.05..0.3);
        for mask in 1..size {
            let mut base = 0.0f64;
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    base = base.max(table[mask ^ (1 << i)]);
                }
            }
            table[mask] = base + (1.0 - base) * rng.gen_range(0.05..0.6);
        }
        let costs = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        Technology::new(costs, table).unwrap()
    }

    fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> MixedProfile<f64> {
        MixedProfile::new((0..n).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap()
    }

    #[test]
    fn validate_accepts_and_technology() {
        let tech = Technology::new(vec![1.0, 1.0], and_table(&[0.1, 0.1], &[0.9, 0.9]));
        assert!(tech.is_ok());
    }

    #[test]
    fn validate_rejects_zero_probability() {
        let err = Technology::new(vec![1.0, 1.0], vec![0.0, 0.5, 0.5, 0.9]).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonPositiveProbability { .. })));
        assert!(format!("{err}").contains("zero success probability"));
    }

    #[test]
    fn validate_rejects_flat_step() {
        // t(1,0) == t(0,0) violates strict monotonicity
        let err = Technology::new(vec![1.0, 1.0], vec![0.2, 0.2, 0.5, 0.9]).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonStrictMonotonicity { agent: 0, .. })));
    }

    #[test]
    fn validate_rejects_too_many_agents() {
        let n = MAX_AGENTS + 1;
        let err = Technology::new(vec![1.0; n], vec![0.5; 1 << n]).unwrap_err();
        assert!(err.violations.iter().any(|v| matches!(v, Violation::TooManyAgents { .. })));
    }

    #[test]
    fn eval_pure_matches_example_31() {
        let tech = example_31();
        assert!((tech.eval_pure(AgentSet(0b00)) - 0.1719).abs() < 1e-12);
        assert!((tech.eval_pure(AgentSet(0b01)) - 0.9181).abs() < 1e-12);
        assert!((tech.eval_pure(AgentSet(0b10)) - 0.9181).abs() < 1e-12);
        assert!((tech.eval_pure(AgentSet(0b11)) - 0.9919).abs() < 1e-12);
    }

    #[test]
    fn eval_mixed_matches_example_31() {
        let tech = example_31();
        let q = MixedProfile::new(vec![0.92, 0.92]).unwrap();
        assert!((tech.eval_mixed(&q) - 0.976).abs() < 5e-4);
        let q10 = MixedProfile::new(vec![1.0, 0.92]).unwrap();
        assert!((tech.eval_mixed(&q10) - 0.986).abs() < 5e-4);
        let zero = MixedProfile::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(tech.eval_mixed(&zero), tech.eval_pure(AgentSet::EMPTY));
    }

    #[test]
    fn marginal_matches_example_31() {
        let tech = example_31();
        let q = MixedProfile::new(vec![0.0, 0.92]).unwrap();
        assert!((tech.marginal(0, &q) - 0.12759).abs() < 1e-4);

        let and = Technology::new(vec![1.0, 1.0], and_table(&[0.1, 0.1], &[0.9, 0.9])).unwrap();
        let at_zero = MixedProfile::new(vec![0.0, 0.0]).unwrap();
        assert!((and.marginal(0, &at_zero) - 0.08).abs() < 1e-12);

        // at the all-ones profile the marginal is the pure top-level one
        let ones = MixedProfile::new(vec![1.0, 1.0]).unwrap();
        let full = AgentSet::full(2);
        assert_eq!(tech.marginal(0, &ones), tech.marginal_set(0, full));
    }

    #[test]
    fn classify_and_is_irs_or_is_drs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..=3);
            let gammas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.4)).collect();
            let deltas: Vec<f64> =
                gammas.iter().map(|g| g + rng.gen_range(0.1..(0.99 - g))).collect();
            let and =
                Technology::new(vec![1.0; n], and_table(&gammas, &deltas)).unwrap();
            assert_eq!(and.classify_returns().class, ReturnsClass::Irs);
            let or = Technology::new(vec![1.0; n], or_table(&gammas, &deltas)).unwrap();
            assert_eq!(or.classify_returns().class, ReturnsClass::Drs);
        }
    }

    #[test]
    fn classify_modular_is_both() {
        let table: Vec<f64> = (0..4u32)
            .map(|m| 0.1 + 0.2 * (m.count_ones() as f64))
            .collect();
        let tech = Technology::new(vec![1.0, 1.0], table).unwrap();
        let cls = tech.classify_returns();
        assert_eq!(cls.class, ReturnsClass::Both);
        assert!(cls.irs_witness.is_none() && cls.drs_witness.is_none());
    }

    #[test]
    fn anonymous_or3_levels() {
        let tech = Technology::new(
            vec![1.0; 3],
            or_table(&[0.1, 0.1, 0.1], &[0.9, 0.9, 0.9]),
        )
        .unwrap();
        let levels = tech.as_anonymous().unwrap();
        let expected = [0.271, 0.919, 0.991, 0.999];
        for (got, want) in levels.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn asymmetric_table_not_anonymous() {
        let tech = Technology::new(vec![1.0, 1.0], vec![0.1, 0.5, 0.4, 0.9]).unwrap();
        assert!(tech.as_anonymous().is_none());
        // single agent is vacuously anonymous
        let one = Technology::new(vec![1.0], vec![0.1, 0.9]).unwrap();
        assert_eq!(one.as_anonymous().unwrap(), vec![0.1, 0.9]);
    }

    #[test]
    fn distinct_costs_not_anonymous() {
        let tech =
            Technology::new(vec![1.0, 2.0], or_table(&[0.09, 0.09], &[0.91, 0.91])).unwrap();
        assert!(tech.as_anonymous().is_none());
    }

    #[test]
    fn restrict_support_example_31() {
        let tech = example_31();
        let sub = tech.restrict_support(AgentSet::singleton(0)).unwrap();
        assert_eq!(sub.n(), 1);
        assert!((sub.eval_pure(AgentSet(0)) - 0.1719).abs() < 1e-12);
        assert!((sub.eval_pure(AgentSet(1)) - 0.9181).abs() < 1e-12);

        let same = tech.restrict_support(AgentSet::full(2)).unwrap();
        assert_eq!(same.table(), tech.table());
    }

    #[test]
    fn restrict_and3_to_pair_folds_gamma() {
        let gammas = [0.1, 0.2, 0.3];
        let deltas = [0.9, 0.8, 0.7];
        let tech = Technology::new(vec![1.0; 3], and_table(&gammas, &deltas)).unwrap();
        let sub = tech.restrict_support(AgentSet(0b011)).unwrap();
        // agent 3 pinned to shirk contributes a flat factor gamma_3
        let expect = and_table(&gammas[..2], &deltas[..2]);
        for (got, want) in sub.table().iter().zip(expect) {
            assert!((got - want * 0.3).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn multilinearity_identity(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tech = random_technology(&mut rng, n);
            let q = random_profile(&mut rng, n);
            let t = tech.eval_mixed(&q);
            for i in 0..n {
                let (t0, t1) = tech.own_action_pair(i, &q);
                let recomposed = q.get(i) * t1 + (1.0 - q.get(i)) * t0;
                prop_assert!((t - recomposed).abs() <= 1e-12);
                prop_assert!(tech.marginal(i, &q) > 0.0);
            }
        }

        #[test]
        fn degenerate_profiles_evaluate_exactly(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tech = random_technology(&mut rng, n);
            for mask in 0..1u32 << n {
                let s = AgentSet(mask);
                let q = MixedProfile::pure(s, n);
                prop_assert_eq!(tech.eval_mixed(&q), tech.eval_pure(s));
            }
        }

        #[test]
        fn anonymous_eval_is_permutation_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tech = Technology::new(
                vec![1.0; 3],
                or_table(&[0.2, 0.2, 0.2], &[0.8, 0.8, 0.8]),
            ).unwrap();
            let q = random_profile(&mut rng, 3);
            let mut perm: Vec<f64> = q.as_slice().to_vec();
            perm.rotate_left(1);
            let qp = MixedProfile::new(perm).unwrap();
            prop_assert!((tech.eval_mixed(&q) - tech.eval_mixed(&qp)).abs() <= 1e-12);
        }
    }
}
