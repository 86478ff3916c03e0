//! Mixed-strategy contracts: indifference payments, equilibrium checks, the
//! optimal-contract search, a brute-force grid oracle, and robustness to
//! coalitional deviations.
//!
//! A mixing agent must be exactly indifferent between effort and shirking,
//! which pins the payment to `c_i / Δ_i(q_{-i})`. The principal's utility is
//! smooth on the open cell of profiles with a fixed support but jumps when
//! the support changes, so the search enumerates supports and runs
//! multi-start coordinate ascent inside each cell.

use rayon::prelude::*;

use crate::pure::solve_pure;
use crate::scalar::{lit, Real, Scalar};
use crate::technology::{AgentSet, MixedProfile, Technology};

/// Default seed for the scrambled low-discrepancy start points.
pub const DEFAULT_SEED: u64 = 424242;

/// Search options for [`solve_mixed_with`].
#[derive(Clone, Debug)]
pub struct SolveOpts {
    /// Start points per support cell.
    pub starts: usize,
    /// Stop sweeping once a full sweep improves utility by less than this.
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    /// Intervals of the coarse scan that brackets each line search.
    pub line_scan: usize,
    /// Golden-section interval tolerance of each line search.
    pub line_xtol: f64,
    /// Seed for the Cranley-Patterson rotation of the Halton start grid.
    pub seed: u64,
    /// Also search symmetric profiles on anonymous technologies.
    pub symmetric_search: bool,
    /// Probabilities this close to 0 or 1 snap to a degenerate profile.
    pub snap_tol: f64,
    /// Refuse instances with more agents than this.
    pub max_agents: usize,
    /// Re-run coordinate ascent from the best candidate at tight tolerances.
    pub polish: bool,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            starts: 16,
            sweep_tol: 1e-10,
            max_sweeps: 60,
            line_scan: 32,
            line_xtol: 1e-10,
            seed: DEFAULT_SEED,
            symmetric_search: true,
            snap_tol: 1e-6,
            max_agents: 10,
            polish: true,
        }
    }
}

/// Errors from the mixed solver and its oracle.
#[derive(Clone, Debug, thiserror::Error)]
pub enum SolveError {
    #[error("mixed solver supports at most {cap} agents, got {n}")]
    TooManyAgents { n: usize, cap: usize },
    #[error("grid oracle would evaluate {cells} profiles, more than the cap of {cap}")]
    GridTooLarge { cells: u128, cap: u128 },
}

/// A mixed contract: induced equilibrium profile, success-contingent
/// payments, and the principal's utility at the queried value.
#[derive(Clone, Debug)]
pub struct MixedContract<T> {
    pub profile: MixedProfile<T>,
    /// Zero outside the support; `c_i / Δ_i(q_{-i})` on it.
    pub payments: Vec<T>,
    pub utility: T,
    pub degenerate: bool,
}

/// The unique payment making agent `i` indifferent between effort and
/// shirking: `c_i / Δ_i(q_{-i})`.
pub fn indifference_payment<T: Scalar>(tech: &Technology<T>, i: usize, q: &MixedProfile<T>) -> T {
    tech.cost(i) / tech.marginal(i, q)
}

/// Expected utility of agent `i` under profile `q` and the given success
/// payment: `t(q) * payment - q_i * c_i`.
pub fn agent_utility<T: Scalar>(
    tech: &Technology<T>,
    i: usize,
    q: &MixedProfile<T>,
    payment: T,
) -> T {
    tech.eval_mixed(q) * payment - q.get(i) * tech.cost(i)
}

/// Principal utility when inducing `q` with the minimal (indifference)
/// payments to every supported agent.
pub fn principal_utility_mixed<T: Scalar>(tech: &Technology<T>, q: &MixedProfile<T>, v: T) -> T {
    let mut total = T::zero();
    for i in q.support().iter() {
        total = total + indifference_payment(tech, i, q);
    }
    tech.eval_mixed(q) * (v - total)
}

/// Checks the mixed Nash conditions under the given payments: strict mixers
/// must be indifferent, full-effort agents must weakly prefer effort, and
/// shirkers must weakly prefer shirking.
pub fn verify_mixed_nash<T: Scalar>(
    tech: &Technology<T>,
    q: &MixedProfile<T>,
    payments: &[T],
    tol: T,
) -> bool {
    assert_eq!(payments.len(), tech.n());
    for i in 0..tech.n() {
        let gain = payments[i].clone() * tech.marginal(i, q);
        let cost = tech.cost(i);
        let qi = q.get(i);
        if qi == T::one() {
            if gain < cost - tol.clone() {
                return false;
            }
        } else if qi == T::zero() {
            if gain > cost + tol.clone() {
                return false;
            }
        } else {
            let diff = crate::technology::abs_diff(gain, cost);
            if diff > tol.clone() {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// fast evaluation on a restricted table
// ---------------------------------------------------------------------------

/// Multilinear extension of `table` at `q`, using `buf` as scratch.
fn eval_slice<T: Real>(table: &[T], q: &[T], buf: &mut Vec<T>) -> T {
    buf.clear();
    buf.extend_from_slice(table);
    let mut len = table.len();
    for i in (0..q.len()).rev() {
        len /= 2;
        let (qi, co) = (q[i], T::one() - q[i]);
        for j in 0..len {
            buf[j] = co * buf[j] + qi * buf[j + len];
        }
    }
    buf[0]
}

/// `(t(0, q_{-i}), t(1, q_{-i}))` on a restricted table.
fn pair_slice<T: Real>(table: &[T], q: &[T], i: usize, buf: &mut Vec<T>) -> (T, T) {
    buf.clear();
    buf.extend_from_slice(table);
    let mut len = table.len();
    for j in (i + 1..q.len()).rev() {
        len /= 2;
        let (qj, co) = (q[j], T::one() - q[j]);
        for m in 0..len {
            buf[m] = co * buf[m] + qj * buf[m + len];
        }
    }
    for j in 0..i {
        len /= 2;
        let (qj, co) = (q[j], T::one() - q[j]);
        for m in 0..len {
            buf[m] = co * buf[2 * m] + qj * buf[2 * m + 1];
        }
    }
    (buf[0], buf[1])
}

/// Objective of one support cell: every agent of the (restricted) support is
/// paid the indifference payment whether or not the coordinate is interior.
struct CellEval<T> {
    table: Vec<T>,
    costs: Vec<T>,
    v: T,
    buf: Vec<T>,
}

impl<T: Real> CellEval<T> {
    fn new(tech: &Technology<T>, support: AgentSet, v: T) -> Self {
        let sub = tech.restrict_support(support).expect("restriction of a valid technology");
        CellEval { table: sub.table().to_vec(), costs: sub.costs().to_vec(), v, buf: Vec::new() }
    }

    fn utility(&mut self, q: &[T]) -> T {
        let t = eval_slice(&self.table, q, &mut self.buf);
        let mut pay = T::zero();
        for i in 0..q.len() {
            let (t0, t1) = pair_slice(&self.table, q, i, &mut self.buf);
            pay = pay + self.costs[i] / (t1 - t0);
        }
        t * (self.v - pay)
    }
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` over `[0, 1]`: coarse scan, then golden-section refinement
/// around the best scan point. Returns `(argmax, max)`.
fn line_max<T: Real, F: FnMut(T) -> T>(mut f: F, scan: usize, xtol: T) -> (T, T) {
    let scan = scan.max(2);
    let step = T::one() / lit::<T>(scan as f64);
    let mut best_j = 0usize;
    let mut best_val = f(T::zero());
    for j in 1..=scan {
        let x = if j == scan { T::one() } else { lit::<T>(j as f64) * step };
        let val = f(x);
        if val > best_val {
            best_val = val;
            best_j = j;
        }
    }
    let mut lo = if best_j == 0 { T::zero() } else { lit::<T>((best_j - 1) as f64) * step };
    let mut hi =
        if best_j >= scan { T::one() } else { lit::<T>((best_j + 1) as f64) * step };
    let ratio: T = lit(INV_GOLDEN);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = (lo + hi) / lit(2.0);
    let fm = f(mid);
    // the scan best can still win when the bracket is flat
    if fm >= best_val {
        (mid, fm)
    } else {
        let x = if best_j == scan {
            T::one()
        } else if best_j == 0 {
            T::zero()
        } else {
            lit::<T>(best_j as f64) * step
        };
        (x, best_val)
    }
}

/// Coordinate ascent inside one cell; `q` is updated in place.
fn ascend<T: Real>(
    eval: &mut CellEval<T>,
    q: &mut [T],
    scan: usize,
    xtol: T,
    sweep_tol: T,
    max_sweeps: usize,
) -> T {
    let mut best = eval.utility(q);
    for _ in 0..max_sweeps {
        let before = best;
        for d in 0..q.len() {
            let (x, val) = line_max(
                |x| {
                    q[d] = x;
                    eval.utility(q)
                },
                scan,
                xtol,
            );
            q[d] = x;
            best = val;
        }
        if best - before <= sweep_tol {
            break;
        }
    }
    best
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Start points: the pure corner, the centroid, then a seeded
/// Cranley-Patterson rotation of the Halton sequence.
fn start_points<T: Real>(dims: usize, starts: usize, seed: u64, cell: u32) -> Vec<Vec<T>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
        seed ^ (cell as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
    );
    let shift: Vec<f64> = (0..dims).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut points = Vec::with_capacity(starts);
    points.push(vec![T::one(); dims]);
    if starts > 1 {
        points.push(vec![lit(0.5); dims]);
    }
    for k in 0..starts.saturating_sub(2) {
        let p = (0..dims)
            .map(|d| {
                let u = (halton(k as u64 + 1, PRIMES[d % PRIMES.len()]) + shift[d]).fract();
                lit(u)
            })
            .collect();
        points.push(p);
    }
    points
}

/// Best profile found in the cell of profiles with support exactly inside
/// `support` (coordinates may hit 0 or 1).
fn search_cell<T: Real>(
    tech: &Technology<T>,
    support: AgentSet,
    v: T,
    opts: &SolveOpts,
) -> (Vec<T>, T) {
    let dims = support.len();
    let mut eval = CellEval::new(tech, support, v);
    let xtol: T = lit(opts.line_xtol);
    let sweep_tol: T = lit(opts.sweep_tol);
    let mut best_q = vec![T::one(); dims];
    let mut best_u = eval.utility(&best_q);
    for mut q in start_points::<T>(dims, opts.starts, opts.seed, support.0) {
        let u = ascend(&mut eval, &mut q, opts.line_scan, xtol, sweep_tol, opts.max_sweeps);
        if u > best_u {
            best_u = u;
            best_q = q;
        }
    }
    (best_q, best_u)
}

/// Embeds a restricted-cell profile into a full `n`-agent profile.
fn embed<T: Real>(n: usize, support: AgentSet, q: &[T]) -> MixedProfile<T> {
    let mut full = vec![T::zero(); n];
    for (slot, agent) in support.iter().enumerate() {
        full[agent] = q[slot];
    }
    MixedProfile::new(full).expect("cell coordinates stay in [0,1]")
}

fn snap<T: Real>(q: &MixedProfile<T>, tol: T) -> Option<MixedProfile<T>> {
    let mut out = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        let x = q.get(i);
        if x <= tol {
            out.push(T::zero());
        } else if T::one() - x <= tol {
            out.push(T::one());
        } else {
            return None;
        }
    }
    Some(MixedProfile::new(out).unwrap())
}

/// Builds the canonical contract for a profile: indifference payments on the
/// support, utility recomputed from them.
pub fn contract_for<T: Real>(tech: &Technology<T>, q: MixedProfile<T>, v: T) -> MixedContract<T> {
    let payments = (0..tech.n())
        .map(|i| if q.get(i) > T::zero() { indifference_payment(tech, i, &q) } else { T::zero() })
        .collect();
    let utility = principal_utility_mixed(tech, &q, v);
    let degenerate = q.is_degenerate();
    MixedContract { profile: q, payments, utility, degenerate }
}

/// Optimal mixed contract with default options.
pub fn solve_mixed<T: Real>(tech: &Technology<T>, v: T) -> Result<MixedContract<T>, SolveError> {
    solve_mixed_with(tech, v, &SolveOpts::default())
}

/// Optimal mixed contract at value `v`.
///
/// Enumerates supports and runs multi-start coordinate ascent in each cell;
/// on anonymous technologies additionally optimizes symmetric profiles with
/// `k` agents at a common probability. The returned utility is never below
/// the optimal pure contract's (pure profiles are candidates), and profiles
/// within `snap_tol` of a degenerate one are snapped to it.
pub fn solve_mixed_with<T: Real>(
    tech: &Technology<T>,
    v: T,
    opts: &SolveOpts,
) -> Result<MixedContract<T>, SolveError> {
    let n = tech.n();
    if n > opts.max_agents {
        return Err(SolveError::TooManyAgents { n, cap: opts.max_agents });
    }

    // the exact pure optimum seeds the search and floors the result
    let pure = solve_pure(tech, v);
    let mut best = contract_for(tech, MixedProfile::pure(pure.set, n), v);

    let mut candidates: Vec<MixedProfile<T>> = Vec::new();

    if opts.symmetric_search {
        if let Some(_levels) = tech.as_anonymous() {
            for k in 1..=n {
                let support = AgentSet(((1u64 << k) - 1) as u32);
                let mut eval = CellEval::new(tech, support, v);
                let (x, _) = line_max(
                    |x| {
                        let q = vec![x; k];
                        eval.utility(&q)
                    },
                    128,
                    lit(1e-13),
                );
                candidates.push(embed(n, support, &vec![x; k]));
            }
        }
    }

    let cells: Vec<(Vec<T>, AgentSet)> = (1..1u32 << n)
        .into_par_iter()
        .map(|mask| {
            let support = AgentSet(mask);
            let (q, _) = search_cell(tech, support, v, opts);
            (q, support)
        })
        .collect();
    for (q, support) in cells {
        candidates.push(embed(n, support, &q));
    }

    let snap_tol: T = lit(opts.snap_tol);
    for q in candidates {
        let q = match snap(&q, snap_tol) {
            Some(snapped) => snapped,
            None => q,
        };
        let cand = contract_for(tech, q, v);
        if cand.utility > best.utility {
            best = cand;
        }
    }

    if opts.polish && !best.degenerate {
        let support = best.profile.support();
        let mut eval = CellEval::new(tech, support, v);
        let mut q: Vec<T> = support.iter().map(|i| best.profile.get(i)).collect();
        ascend(&mut eval, &mut q, opts.line_scan.max(48), lit(1e-13), lit(1e-14), 300);
        let polished = embed(n, support, &q);
        let polished = match snap(&polished, snap_tol) {
            Some(s) => s,
            None => polished,
        };
        let cand = contract_for(tech, polished, v);
        if cand.utility > best.utility {
            best = cand;
        }
    }

    Ok(best)
}

// ---------------------------------------------------------------------------
// grid oracle
// ---------------------------------------------------------------------------

/// Evaluation budget of [`grid_oracle_mixed`].
pub const GRID_CAP: u128 = 1_500_000_000;

/// Exhaustive, deterministic grid search over all supports and profile
/// coordinates in `{res, 2·res, .., 1}`. Ground truth for the solver at
/// desk scale.
pub fn grid_oracle_mixed<T: Real>(
    tech: &Technology<T>,
    v: T,
    resolution: f64,
) -> Result<MixedContract<T>, SolveError> {
    let n = tech.n();
    let steps = (1.0 / resolution).round() as usize;
    assert!(steps >= 2, "resolution too coarse");
    let mut cells: u128 = 0;
    for mask in 0..1u32 << n {
        cells += (steps as u128).pow(mask.count_ones());
    }
    if cells > GRID_CAP {
        return Err(SolveError::GridTooLarge { cells, cap: GRID_CAP });
    }

    let grid: Vec<T> = (1..=steps)
        .map(|k| if k == steps { T::one() } else { lit::<T>(k as f64 * resolution) })
        .collect();

    let mut best_profile = MixedProfile::pure(AgentSet::EMPTY, n);
    let mut best_u = tech.eval_mixed(&best_profile) * v;

    for mask in 1..1u32 << n {
        let support = AgentSet(mask);
        let k = support.len();
        let sub = tech.restrict_support(support).expect("valid restriction");
        let table = sub.table().to_vec();
        let costs = sub.costs().to_vec();
        let outer_count: usize = steps.pow(k as u32 - 1);

        let found = (0..outer_count)
            .into_par_iter()
            .map(|outer| {
                let mut q = vec![T::zero(); k];
                let mut rem = outer;
                for d in 0..k - 1 {
                    q[d] = grid[rem % steps];
                    rem /= steps;
                }
                let mut buf = Vec::new();
                // t(q) is linear in the last coordinate: A + B x
                q[k - 1] = T::zero();
                let (a, b) = {
                    let (t0, t1) = pair_slice(&table, &q, k - 1, &mut buf);
                    (t0, t1 - t0)
                };
                // payment of the last agent is constant over the inner loop
                let p_last = costs[k - 1] / b;
                // other agents' marginals are linear in x: C_i + D_i x
                let mut lin = Vec::with_capacity(k - 1);
                for i in 0..k - 1 {
                    q[k - 1] = T::zero();
                    let (lo0, hi0) = pair_slice(&table, &q, i, &mut buf);
                    q[k - 1] = T::one();
                    let (lo1, hi1) = pair_slice(&table, &q, i, &mut buf);
                    let c0 = hi0 - lo0;
                    let c1 = hi1 - lo1;
                    lin.push((costs[i], c0, c1 - c0));
                }
                let mut local_best = (T::neg_infinity(), 0usize);
                for (j, &x) in grid.iter().enumerate() {
                    let mut pay = p_last;
                    for &(c, c0, d) in &lin {
                        pay = pay + c / (c0 + d * x);
                    }
                    let u = (a + b * x) * (v - pay);
                    if u > local_best.0 {
                        local_best = (u, j);
                    }
                }
                (local_best.0, outer, local_best.1)
            })
            .reduce(
                || (T::neg_infinity(), usize::MAX, usize::MAX),
                |x, y| {
                    if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                        y
                    } else {
                        x
                    }
                },
            );

        let (u, outer, inner) = found;
        if u > best_u {
            let mut q = vec![T::zero(); k];
            let mut rem = outer;
            for d in 0..k - 1 {
                q[d] = grid[rem % steps];
                rem /= steps;
            }
            q[k - 1] = grid[inner];
            best_profile = embed(n, support, &q);
            best_u = u;
        }
    }

    Ok(contract_for(tech, best_profile, v))
}

// ---------------------------------------------------------------------------
// payment bounds and strong equilibrium
// ---------------------------------------------------------------------------

/// Lemma-style payment bracket for a supported agent.
#[derive(Clone, Debug)]
pub struct PaymentBounds<T> {
    /// `min over T ⊆ S_{-i}` of the pure payment `c_i / Δ_i(T)`.
    pub lower: T,
    /// `max over T ⊆ S_{-i}` of the pure payment.
    pub upper: T,
    /// The mixed indifference payment `c_i / Δ_i(q_{-i})`.
    pub actual: T,
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("agent {} is not in the support of the profile", agent + 1)]
pub struct NotInSupport {
    pub agent: usize,
}

/// Brackets the mixed payment of agent `i` by the extreme pure payments over
/// subsets of the rest of the support.
pub fn payment_bounds_check<T: Scalar>(
    tech: &Technology<T>,
    q: &MixedProfile<T>,
    i: usize,
) -> Result<PaymentBounds<T>, NotInSupport> {
    let support = q.support();
    if !support.contains(i) {
        return Err(NotInSupport { agent: i });
    }
    let rest = support.without(i);
    let mut lower: Option<T> = None;
    let mut upper: Option<T> = None;
    for t in rest.subsets() {
        let p = tech.cost(i) / tech.marginal_set(i, t.with(i));
        if lower.as_ref().map_or(true, |l| p < *l) {
            lower = Some(p.clone());
        }
        if upper.as_ref().map_or(true, |u| p > *u) {
            upper = Some(p);
        }
    }
    Ok(PaymentBounds {
        lower: lower.unwrap(),
        upper: upper.unwrap(),
        actual: indifference_payment(tech, i, q),
    })
}

/// How far the strong-equilibrium check searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeviationScope {
    /// Only the canonical deviation (all strict mixers move to full effort).
    Canonical,
    /// Canonical plus every coalition with every pure joint deviation.
    CanonicalAndPureCoalitions,
}

/// A profitable joint deviation: every coalition member strictly gains.
#[derive(Clone, Debug)]
pub struct CoalitionDeviation<T> {
    pub coalition: AgentSet,
    pub deviation: MixedProfile<T>,
    /// `(agent, utility gain)` per coalition member; all strictly positive.
    pub gains: Vec<(usize, T)>,
}

/// Verdict of the strong-equilibrium check.
#[derive(Clone, Debug)]
pub struct StrongEqVerdict<T> {
    pub is_strong: bool,
    pub scope: DeviationScope,
    pub witness: Option<CoalitionDeviation<T>>,
}

/// Margin by which every gain must be positive to count as a deviation.
pub const TOL_DEVIATION: f64 = 1e-12;

/// Cap for the exhaustive coalition enumeration.
pub const STRONG_EQ_EXHAUSTIVE_CAP: usize = 10;

fn deviation_witness<T: Scalar>(
    tech: &Technology<T>,
    q: &MixedProfile<T>,
    payments: &[T],
    coalition: AgentSet,
    deviated: &MixedProfile<T>,
) -> Option<CoalitionDeviation<T>> {
    let margin: T = lit(TOL_DEVIATION);
    let mut gains = Vec::new();
    for i in coalition.iter() {
        let before = agent_utility(tech, i, q, payments[i].clone());
        let after = agent_utility(tech, i, deviated, payments[i].clone());
        let gain = after - before;
        if !(gain > margin) {
            return None;
        }
        gains.push((i, gain));
    }
    Some(CoalitionDeviation { coalition, deviation: deviated.clone(), gains })
}

/// Tests whether `q` (a Nash profile under `payments`) is a strong
/// equilibrium: first the canonical deviation of all strict mixers to full
/// effort, then (for up to [`STRONG_EQ_EXHAUSTIVE_CAP`] agents) every
/// coalition with every pure joint deviation.
pub fn strong_eq_check<T: Scalar>(
    tech: &Technology<T>,
    q: &MixedProfile<T>,
    payments: &[T],
) -> StrongEqVerdict<T> {
    let n = tech.n();
    let mixers = q.strict_mixers();
    if mixers.len() >= 2 {
        let mut raised: Vec<T> = q.as_slice().to_vec();
        for i in mixers.iter() {
            raised[i] = T::one();
        }
        let deviated = MixedProfile::new(raised).unwrap();
        if let Some(witness) = deviation_witness(tech, q, payments, mixers, &deviated) {
            return StrongEqVerdict {
                is_strong: false,
                scope: DeviationScope::Canonical,
                witness: Some(witness),
            };
        }
    }
    if n > STRONG_EQ_EXHAUSTIVE_CAP {
        return StrongEqVerdict { is_strong: true, scope: DeviationScope::Canonical, witness: None };
    }
    for mask in 1..1u32 << n {
        let coalition = AgentSet(mask);
        let members: Vec<usize> = coalition.iter().collect();
        for assign in 0..1u32 << members.len() {
            let mut moved: Vec<T> = q.as_slice().to_vec();
            for (j, agent) in members.iter().enumerate() {
                moved[*agent] = if assign >> j & 1 == 1 { T::one() } else { T::zero() };
            }
            let deviated = MixedProfile::new(moved).unwrap();
            if let Some(witness) = deviation_witness(tech, q, payments, coalition, &deviated) {
                return StrongEqVerdict {
                    is_strong: false,
                    scope: DeviationScope::CanonicalAndPureCoalitions,
                    witness: Some(witness),
                };
            }
        }
    }
    StrongEqVerdict {
        is_strong: true,
        scope: DeviationScope::CanonicalAndPureCoalitions,
        witness: None,
    }
}
