//! Price of Purity: the worst ratio, over the value axis, between the
//! optimal mixed and optimal pure principal utilities, plus an audit harness
//! for every upper bound we know to hold for it.
//!
//! The supremum is attained at a transition point of the pure case, so `pop`
//! only evaluates the ratio there; a randomized cross-check lives in the
//! test suites.

use rayon::prelude::*;

use crate::mixed::{grid_oracle_mixed, solve_mixed_with, MixedContract, SolveError, SolveOpts};
use crate::pure::{pou, pure_envelope, solve_pure, PureContract};
use crate::scalar::{lit, Real};
use crate::technology::{AgentSet, ReturnsClass, Technology};

/// Slack allowed when comparing the computed POP against a bound.
pub const TOL_BOUND: f64 = 1e-6;

/// The constant `2(3-2√3)/(3(√3-2)) = 2/√3 ≈ 1.1547` bounding anonymous OR
/// technologies with `γ = 1-δ < 1/2`.
pub fn or_complement_constant<T: Real>() -> T {
    let s3 = lit::<T>(3.0).sqrt();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    two * (three - two * s3) / (three * (s3 - two))
}

/// One audited upper bound on the POP.
#[derive(Clone, Debug)]
pub struct BoundCheck<T> {
    pub name: &'static str,
    /// The bound's value when computable for this instance.
    pub value: Option<T>,
    /// Whether the bound's hypothesis holds for this instance.
    pub applicable: bool,
    /// `pop <= value + TOL_BOUND` (vacuously true when not applicable).
    pub satisfied: bool,
}

/// Result of the POP computation with its witnesses and bound audit.
#[derive(Clone, Debug)]
pub struct PurityReport<T> {
    /// Worst mixed/pure utility ratio over the transition points; at least 1.
    pub pop: T,
    /// Transition point where the worst ratio is attained.
    pub witness_v: T,
    pub mixed_at_witness: MixedContract<T>,
    pub pure_at_witness: PureContract<T>,
    /// Grid-oracle ratio at the witness, recorded for n <= 2 instances.
    pub oracle_pop: Option<T>,
    /// Filled by [`check_bounds`].
    pub bounds: Vec<BoundCheck<T>>,
}

/// Price of Purity with default solver options.
pub fn pop<T: Real>(tech: &Technology<T>) -> Result<PurityReport<T>, SolveError> {
    pop_with(tech, &SolveOpts::default())
}

/// Evaluates the mixed/pure ratio at every pure transition point and keeps
/// the worst, together with both optima there.
pub fn pop_with<T: Real>(
    tech: &Technology<T>,
    opts: &SolveOpts,
) -> Result<PurityReport<T>, SolveError> {
    let points = pure_envelope(tech).breakpoints;
    assert!(!points.is_empty(), "a valid technology has at least one transition point");

    let evaluated: Vec<Result<(T, MixedContract<T>, PureContract<T>), SolveError>> = points
        .par_iter()
        .map(|v| {
            let mixed = solve_mixed_with(tech, *v, opts)?;
            let pure = solve_pure(tech, *v);
            let ratio = mixed.utility / pure.utility;
            Ok((ratio, mixed, pure))
        })
        .collect();

    let mut best: Option<(T, T, MixedContract<T>, PureContract<T>)> = None;
    for (v, result) in points.iter().zip(evaluated) {
        let (ratio, mixed, pure) = result?;
        let replace = match &best {
            None => true,
            Some((r, ..)) => ratio > *r,
        };
        if replace {
            best = Some((ratio, *v, mixed, pure));
        }
    }
    let (pop, witness_v, mixed_at_witness, pure_at_witness) = best.unwrap();

    let oracle_pop = if tech.n() <= 2 {
        let oracle = grid_oracle_mixed(tech, witness_v, 1e-3)?;
        Some(oracle.utility / pure_at_witness.utility)
    } else {
        None
    };

    Ok(PurityReport { pop, witness_v, mixed_at_witness, pure_at_witness, oracle_pop, bounds: Vec::new() })
}

/// `t(N)/t(∅)`, an upper bound for every technology.
pub fn pop_bound_general<T: Real>(tech: &Technology<T>) -> T {
    tech.eval_pure(AgentSet::full(tech.n())) / tech.eval_pure(AgentSet::EMPTY)
}

/// The linear bound `n`, applicable to anonymous technologies and to DRS
/// technologies with identical costs.
pub fn pop_bound_n<T: Real>(tech: &Technology<T>) -> Option<T> {
    let anonymous = tech.as_anonymous().is_some();
    let class = tech.classify_returns().class;
    let drs = matches!(class, ReturnsClass::Drs | ReturnsClass::Both);
    if anonymous || (drs && tech.identical_costs()) {
        Some(lit(tech.n() as f64))
    } else {
        None
    }
}

/// The two-agent bounds: 2 in general, 3/2 when anonymous. Requires
/// identical costs.
pub fn pop_bound_two<T: Real>(tech: &Technology<T>) -> Option<T> {
    if tech.n() != 2 || !tech.identical_costs() {
        return None;
    }
    if tech.as_anonymous().is_some() {
        Some(lit(1.5))
    } else {
        Some(lit(2.0))
    }
}

/// Bad OR parameters passed to [`pop_bound_or`].
#[derive(Clone, Debug, thiserror::Error)]
#[error("invalid OR parameters: {0}")]
pub struct OrParamError(pub String);

/// Every applicable POP bound for an OR technology with the given
/// parameters, as `(name, value)` pairs.
pub fn pop_bound_or<T: Real>(
    n: usize,
    gammas: &[T],
    deltas: &[T],
) -> Result<Vec<(&'static str, T)>, OrParamError> {
    if gammas.len() != n || deltas.len() != n || n == 0 {
        return Err(OrParamError(format!(
            "expected {n} gammas and deltas, got {} and {}",
            gammas.len(),
            deltas.len()
        )));
    }
    for i in 0..n {
        if !(gammas[i] >= T::zero() && gammas[i] < T::one()) {
            return Err(OrParamError(format!("gamma_{} = {} outside [0,1)", i + 1, gammas[i])));
        }
        if !(deltas[i] > gammas[i] && deltas[i] <= T::one()) {
            return Err(OrParamError(format!(
                "delta_{} = {} must lie in (gamma_{}, 1]",
                i + 1,
                deltas[i],
                i + 1
            )));
        }
    }

    let one = T::one();
    let or_t = |exerting: &dyn Fn(usize) -> bool| -> T {
        let mut fail = one;
        for i in 0..n {
            fail = fail * (one - if exerting(i) { deltas[i] } else { gammas[i] });
        }
        one - fail
    };

    let mut bounds = Vec::new();
    let anonymous = gammas.iter().all(|g| *g == gammas[0]) && deltas.iter().all(|d| *d == deltas[0]);
    if anonymous {
        let delta = deltas[0];
        let gamma = gammas[0];
        bounds.push(("or anonymous (1-(1-d)^n)/d", (one - (one - delta).powi(n as i32)) / delta));
        bounds.push(("or anonymous n-(n-1)d", lit::<T>(n as f64) - lit::<T>((n - 1) as f64) * delta));
        let t_n = one - (one - delta).powi(n as i32);
        let t_1 = one - (one - delta) * (one - gamma).powi(n as i32 - 1);
        bounds.push(("or anonymous tn/t1", t_n / t_1));
        if gamma < lit(0.5) && (gamma - (one - delta)).abs() <= lit(1e-9) {
            bounds.push(("or complement constant 2/sqrt(3)", or_complement_constant()));
        }
    }
    // any OR technology exhibits DRS: bound by the best single agent
    let t_full = or_t(&|_| true);
    let mut best_single = T::zero();
    for i in 0..n {
        let t_i = or_t(&|j| j == i);
        if t_i > best_single {
            best_single = t_i;
        }
    }
    bounds.push(("or drs t(N)/t(i*)", t_full / best_single));
    Ok(bounds)
}

/// Recovers `(gamma, delta)` when the table is exactly an anonymous OR
/// technology (within 1e-9), using `t_0 = 1-(1-γ)^n` and `t_n = 1-(1-δ)^n`.
pub fn anonymous_or_parameters<T: Real>(tech: &Technology<T>) -> Option<(T, T)> {
    let levels = tech.as_anonymous()?;
    let n = tech.n();
    let one = T::one();
    let inv_n = one / lit::<T>(n as f64);
    let fail_gamma = (one - levels[0]).powf(inv_n);
    let fail_delta = (one - levels[n]).powf(inv_n);
    let gamma = one - fail_gamma;
    let delta = one - fail_delta;
    if !(delta > gamma) {
        return None;
    }
    let tol: T = lit(1e-9);
    for (m, level) in levels.iter().enumerate() {
        let expect = one - fail_delta.powi(m as i32) * fail_gamma.powi((n - m) as i32);
        if (*level - expect).abs() > tol {
            return None;
        }
    }
    Some((gamma, delta))
}

/// Fills the report's bound audit: every bound whose hypothesis holds is
/// compared against the computed POP, and the POU domination check is run.
pub fn check_bounds<T: Real>(tech: &Technology<T>, mut report: PurityReport<T>) -> PurityReport<T> {
    let tol: T = lit(TOL_BOUND);
    let pop = report.pop;
    let mut bounds = Vec::new();
    let mut push = |name: &'static str, value: Option<T>, applicable: bool| {
        let satisfied = !applicable
            || match value {
                Some(b) => pop <= b + tol,
                None => false,
            };
        bounds.push(BoundCheck { name, value, applicable, satisfied });
    };

    push("general t(N)/t(0)", Some(pop_bound_general(tech)), true);

    let pou_result = pou(tech);
    let pou_ok = pou_result.value >= pop - tol;
    bounds.push(BoundCheck {
        name: "pou dominates pop",
        value: Some(pou_result.value),
        applicable: true,
        satisfied: pou_ok,
    });
    let mut push = |name: &'static str, value: Option<T>, applicable: bool| {
        let satisfied = !applicable
            || match value {
                Some(b) => pop <= b + tol,
                None => false,
            };
        bounds.push(BoundCheck { name, value, applicable, satisfied });
    };

    let anonymous = tech.as_anonymous();
    let class = tech.classify_returns().class;
    let drs = matches!(class, ReturnsClass::Drs | ReturnsClass::Both);
    let identical = tech.identical_costs();
    let n = tech.n();

    push("anonymous n", Some(lit(n as f64)), anonymous.is_some());
    push("drs n (identical costs)", Some(lit(n as f64)), drs && identical);

    if drs && identical {
        let mut best_single = T::zero();
        for i in 0..n {
            let t_i = tech.eval_pure(AgentSet::singleton(i));
            if t_i > best_single {
                best_single = t_i;
            }
        }
        let full = tech.eval_pure(AgentSet::full(n));
        push("drs t(N)/t(i*)", Some(full / best_single), true);
    } else {
        push("drs t(N)/t(i*)", None, false);
    }

    match (&anonymous, drs) {
        (Some(levels), true) if n >= 1 => {
            push("anonymous drs tn/t1", Some(levels[n] / levels[1]), true);
        }
        _ => push("anonymous drs tn/t1", None, false),
    }

    push("two agents", Some(lit(2.0)), n == 2 && identical);
    push("two agents anonymous", Some(lit(1.5)), n == 2 && anonymous.is_some());

    if let Some((gamma, delta)) = anonymous_or_parameters(tech) {
        if let Ok(or_bounds) = pop_bound_or(n, &vec![gamma; n], &vec![delta; n]) {
            for (name, value) in or_bounds {
                push(name, Some(value), true);
            }
        }
    }

    report.bounds = bounds;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed::solve_mixed;
    use crate::technology::tests::{and_table, example_31, or_table};
    use crate::technology::Technology;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn or2(gamma: f64, delta: f64) -> Technology<f64> {
        Technology::new(vec![1.0, 1.0], or_table(&[gamma, gamma], &[delta, delta])).unwrap()
    }

    #[test]
    fn pop_of_and_is_one() {
        let tech = Technology::new(vec![1.0, 1.0], and_table(&[0.1, 0.1], &[0.9, 0.9])).unwrap();
        let report = pop(&tech).unwrap();
        assert!((report.pop - 1.0).abs() <= 1e-6, "pop {}", report.pop);
        assert!(report.mixed_at_witness.degenerate);
    }

    #[test]
    fn pop_of_or_instances() {
        let report = pop(&or2(0.0001, 0.9)).unwrap();
        assert!(report.pop >= 1.0233, "pop {}", report.pop);

        let report2 = pop(&example_31()).unwrap();
        assert!(report2.pop >= 1.0187, "pop {}", report2.pop);

        // the n <= 2 oracle corroborates the solver's ratio
        let oracle = report2.oracle_pop.unwrap();
        assert!((oracle - report2.pop).abs() < 1e-3);
    }

    #[test]
    fn pop_witness_is_transition_point() {
        let tech = example_31();
        let report = pop(&tech).unwrap();
        let points = crate::pure::transition_points(&tech);
        assert!(points.iter().any(|p| (*p - report.witness_v).abs() < 1e-12));
    }

    #[test]
    fn general_bound_values() {
        let tech = example_31();
        assert!((pop_bound_general(&tech) - 5.770).abs() < 1e-3);
        let one = Technology::<f64>::new(vec![1.0], vec![0.5, 0.9]).unwrap();
        assert!((pop_bound_general(&one) - 1.8).abs() < 1e-12);
    }

    #[test]
    fn n_bound_applicability() {
        let or3 = Technology::new(
            vec![1.0; 3],
            or_table(&[0.1, 0.1, 0.1], &[0.9, 0.9, 0.9]),
        )
        .unwrap();
        assert_eq!(pop_bound_n(&or3), Some(3.0));

        // non-anonymous NEITHER-class technology: no linear bound
        let mut table = vec![0.0f64; 8];
        for mask in 0..8usize {
            let a1 = (mask & 1) as f64;
            let a2 = (mask >> 1 & 1) as f64;
            let a3 = (mask >> 2 & 1) as f64;
            table[mask] = 0.1 + 0.15 * (a1 + a2 + a3) + 0.1 * a1 * a2 - 0.08 * a1 * a3;
        }
        let neither = Technology::new(vec![1.0; 3], table).unwrap();
        assert_eq!(neither.classify_returns().class, ReturnsClass::Neither);
        assert_eq!(pop_bound_n(&neither), None);

        // DRS non-anonymous two agents
        let drs = Technology::new(vec![1.0, 1.0], vec![0.2, 0.7, 0.6, 0.8]).unwrap();
        assert_eq!(pop_bound_n(&drs), Some(2.0));
    }

    #[test]
    fn two_agent_bound() {
        assert_eq!(pop_bound_two(&example_31()), Some(1.5));
        let drs = Technology::new(vec![1.0, 1.0], vec![0.2, 0.7, 0.6, 0.8]).unwrap();
        assert_eq!(pop_bound_two(&drs), Some(2.0));
        let or3 = Technology::new(
            vec![1.0; 3],
            or_table(&[0.1, 0.1, 0.1], &[0.9, 0.9, 0.9]),
        )
        .unwrap();
        assert_eq!(pop_bound_two(&or3), None);
    }

    #[test]
    fn or_bounds_values() {
        // at delta = sqrt(3)-1 with gamma = 1-delta the tn/t1 ratio peaks
        let delta = 3.0f64.sqrt() - 1.0;
        let gamma = 1.0 - delta;
        let bounds = pop_bound_or(2, &[gamma, gamma], &[delta, delta]).unwrap();
        let tn_t1 = bounds.iter().find(|(n, _)| *n == "or anonymous tn/t1").unwrap().1;
        assert!((tn_t1 - 1.154).abs() < 1e-3, "{tn_t1}");
        assert!(bounds.iter().any(|(n, _)| *n == "or complement constant 2/sqrt(3)"));

        let b4 = pop_bound_or(4, &[0.1f64; 4], &[0.9f64; 4]).unwrap();
        let v = b4.iter().find(|(n, _)| *n == "or anonymous (1-(1-d)^n)/d").unwrap().1;
        assert!((v - 1.11099 / 0.9999).abs() < 2e-3, "{v}");
        assert!((v - (1.0 - 0.1f64.powi(4)) / 0.9).abs() < 1e-12);

        // delta -> 1 sends the bound to 1
        let b1 = pop_bound_or(3, &[0.2f64; 3], &[1.0f64; 3]).unwrap();
        let v1 = b1.iter().find(|(n, _)| *n == "or anonymous (1-(1-d)^n)/d").unwrap().1;
        assert!((v1 - 1.0).abs() < 1e-12);

        assert!(pop_bound_or(2, &[0.5, 0.5], &[0.4, 0.9]).is_err());
    }

    #[test]
    fn check_bounds_example_31_all_pass() {
        let tech = example_31();
        let report = check_bounds(&tech, pop(&tech).unwrap());
        assert!(!report.bounds.is_empty());
        for b in &report.bounds {
            assert!(b.satisfied, "bound {} = {:?} violated by pop {}", b.name, b.value, report.pop);
        }
        // the 3/2, 2 and general bounds are all applicable here
        for name in ["two agents", "two agents anonymous", "general t(N)/t(0)", "pou dominates pop"] {
            assert!(report.bounds.iter().any(|b| b.name == name && b.applicable));
        }
    }

    #[test]
    fn check_bounds_and_technology() {
        let tech = Technology::new(vec![1.0, 1.0], and_table(&[0.1, 0.1], &[0.9, 0.9])).unwrap();
        let report = check_bounds(&tech, pop(&tech).unwrap());
        for b in &report.bounds {
            assert!(b.satisfied, "bound {} violated", b.name);
        }
    }

    #[test]
    fn anonymous_or_complement_bound_holds() {
        let tech = or2(0.3, 0.7);
        let report = check_bounds(&tech, pop(&tech).unwrap());
        let constant = report
            .bounds
            .iter()
            .find(|b| b.name == "or complement constant 2/sqrt(3)")
            .expect("gamma = 1-delta < 1/2, so the constant applies");
        assert!(constant.applicable && constant.satisfied);
        assert!(report.pop <= 1.1548);
    }

    #[test]
    fn or_parameter_detection() {
        let tech = or2(0.09, 0.91);
        let (g, d) = anonymous_or_parameters(&tech).unwrap();
        assert!((g - 0.09).abs() < 1e-9 && (d - 0.91).abs() < 1e-9);
        // AND tables are not OR
        let and = Technology::new(vec![1.0, 1.0], and_table(&[0.2, 0.2], &[0.8, 0.8])).unwrap();
        assert!(anonymous_or_parameters(&and).is_none());
    }

    #[test]
    fn observation_c8_ratio_monotone_in_k() {
        for step in 1..=9 {
            let gamma = 0.05 * step as f64;
            if gamma >= 0.5 {
                break;
            }
            let mut last = f64::INFINITY;
            for k in 2..=6 {
                let ratio = (1.0 - gamma.powi(k)) / (1.0 - gamma * (1.0 - gamma).powi(k - 1));
                assert!(ratio <= last + 1e-12, "gamma {gamma} k {k}");
                last = ratio;
            }
        }
    }

    #[test]
    fn ratio_off_transition_points_never_beats_pop() {
        let tech = or2(0.0001, 0.9);
        let report = pop(&tech).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let v = rng.gen_range(0.5..500.0);
            let mixed = solve_mixed(&tech, v).unwrap();
            let pure = solve_pure(&tech, v);
            let ratio = mixed.utility / pure.utility;
            assert!(ratio <= report.pop + 1e-4, "ratio {ratio} at v={v} beats pop {}", report.pop);
        }
    }
}
