//! Monotone Boolean functions and the structured technologies they define.
//!
//! A structured technology draws each agent's task success independently
//! (probability `γ_i` without effort, `δ_i > γ_i` with effort) and succeeds
//! when a monotone Boolean function of the task outcomes is 1. Functions are
//! kept as dense truth tables (arity capped at 20) and can be parsed from
//! `x1 & (x2 | x3)`-style formulas.

use std::fmt;

use crate::scalar::{lit, Scalar};
use crate::technology::{AgentSet, Technology, ValidationReport};

/// Maximum arity for the dense truth-table representation.
pub const MAX_ARITY: usize = 20;

/// A Boolean function of `n` inputs as a bitmask-indexed truth table.
/// Monotonicity is queried, not enforced at construction.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolFn {
    n: usize,
    truth: Vec<bool>,
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFn(n={}, ", self.n)?;
        for bit in &self.truth {
            write!(f, "{}", if *bit { '1' } else { '0' })?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum BoolFnError {
    #[error("arity {n} outside 1..={MAX_ARITY}")]
    BadArity { n: usize },
    #[error("truth table must have {expected} entries, got {got}")]
    TableSize { expected: usize, got: usize },
}

/// Formula syntax error with a character offset.
#[derive(Clone, Debug, thiserror::Error)]
#[error("formula error at offset {offset}: {msg}")]
pub struct FormulaError {
    pub offset: usize,
    pub msg: String,
}

impl BoolFn {
    pub fn from_table(n: usize, truth: Vec<bool>) -> Result<Self, BoolFnError> {
        if n == 0 || n > MAX_ARITY {
            return Err(BoolFnError::BadArity { n });
        }
        let expected = 1usize << n;
        if truth.len() != expected {
            return Err(BoolFnError::TableSize { expected, got: truth.len() });
        }
        Ok(BoolFn { n, truth })
    }

    /// Parses `x<i>`, `&`, `|` and parentheses; variables are 1-based and
    /// must not exceed `n`.
    pub fn parse_formula(n: usize, src: &str) -> Result<Self, FormulaError> {
        if n == 0 || n > MAX_ARITY {
            return Err(FormulaError { offset: 0, msg: format!("arity {n} unsupported") });
        }
        let expr = FormulaParser::new(src).parse()?;
        let truth = (0..1u32 << n)
            .map(|mask| expr.eval(mask, n))
            .collect::<Result<Vec<bool>, FormulaError>>()?;
        Ok(BoolFn { n, truth })
    }

    /// Disjunction of all `n` variables.
    pub fn disjunction(n: usize) -> Self {
        let truth = (0..1usize << n).map(|m| m != 0).collect();
        BoolFn { n, truth }
    }

    /// Conjunction of all `n` variables.
    pub fn conjunction(n: usize) -> Self {
        let full = (1usize << n) - 1;
        let truth = (0..1usize << n).map(|m| m == full).collect();
        BoolFn { n, truth }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truth(&self) -> &[bool] {
        &self.truth
    }

    pub fn eval(&self, mask: u32) -> bool {
        self.truth[mask as usize]
    }

    /// `x <= y` bitwise implies `f(x) <= f(y)`.
    pub fn is_monotone(&self) -> bool {
        for mask in 0..self.truth.len() {
            if !self.truth[mask] {
                continue;
            }
            for i in 0..self.n {
                let bit = 1usize << i;
                if mask & bit == 0 && !self.truth[mask | bit] {
                    return false;
                }
            }
        }
        true
    }

    /// `Some(value)` when the function is constant.
    pub fn constant_value(&self) -> Option<bool> {
        let first = self.truth[0];
        if self.truth.iter().all(|b| *b == first) {
            Some(first)
        } else {
            None
        }
    }

    /// When `f(x) = AND of x_i over B` for some bit set `B`, returns `B`
    /// (`B = ∅` for the constant 1). The constant 0 is not a conjunction.
    pub fn conjunction_set(&self) -> Option<AgentSet> {
        // candidate set: the minimum support of any satisfying assignment is
        // forced; check f is exactly "all bits of B set"
        let full = (self.truth.len() - 1) as u32;
        if !self.truth[full as usize] {
            return None;
        }
        let mut required = full;
        for (mask, value) in self.truth.iter().enumerate() {
            if *value {
                required &= mask as u32;
            }
        }
        for (mask, value) in self.truth.iter().enumerate() {
            let expect = (mask as u32) & required == required;
            if *value != expect {
                return None;
            }
        }
        Some(AgentSet(required))
    }

    pub fn depends_on(&self, i: usize) -> bool {
        let bit = 1usize << i;
        (0..self.truth.len())
            .any(|mask| mask & bit == 0 && self.truth[mask] != self.truth[mask | bit])
    }

    /// Restriction `f|x_i = value` as a function of the remaining `n-1`
    /// variables (higher variables shift down by one).
    pub fn restrict(&self, i: usize, value: bool) -> BoolFn {
        assert!(i < self.n);
        let n = self.n - 1;
        let low_mask = (1u32 << i) - 1;
        let truth = (0..1u32 << n)
            .map(|m| {
                let mut full = (m & low_mask) | ((m & !low_mask) << 1);
                if value {
                    full |= 1 << i;
                }
                self.truth[full as usize]
            })
            .collect();
        BoolFn { n, truth }
    }
}

// --- tiny recursive-descent parser: expr := term ('|' term)*,
//     term := atom ('&' atom)*, atom := 'x'<int> | '(' expr ')' ---

enum Expr {
    Var(usize),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, mask: u32, n: usize) -> Result<bool, FormulaError> {
        match self {
            Expr::Var(i) => {
                if *i >= n {
                    return Err(FormulaError {
                        offset: 0,
                        msg: format!("variable x{} exceeds arity {n}", i + 1),
                    });
                }
                Ok(mask >> i & 1 == 1)
            }
            Expr::And(a, b) => Ok(a.eval(mask, n)? && b.eval(mask, n)?),
            Expr::Or(a, b) => Ok(a.eval(mask, n)? || b.eval(mask, n)?),
        }
    }
}

struct FormulaParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> FormulaParser<'a> {
    fn new(src: &'a str) -> Self {
        FormulaParser { src: src.as_bytes(), pos: 0 }
    }

    fn error(&self, msg: impl Into<String>) -> FormulaError {
        FormulaError { offset: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(&mut self) -> Result<Expr, FormulaError> {
        let expr = self.parse_or()?;
        if self.peek().is_some() {
            return Err(self.error("trailing input"));
        }
        Ok(expr)
    }

    fn parse_or(&mut self) -> Result<Expr, FormulaError> {
        let mut left = self.parse_and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let right = self.parse_and()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Expr, FormulaError> {
        let mut left = self.parse_atom()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let right = self.parse_atom()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_atom(&mut self) -> Result<Expr, FormulaError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_or()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected variable index after 'x'"));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let idx: usize =
                    digits.parse().map_err(|_| self.error("variable index out of range"))?;
                if idx == 0 {
                    return Err(self.error("variables are 1-based"));
                }
                Ok(Expr::Var(idx - 1))
            }
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}

// ---------------------------------------------------------------------------
// OR restriction (induction on the variables the function depends on)
// ---------------------------------------------------------------------------

/// An assignment to all but two variables under which the function becomes
/// the disjunction of the two free variables.
#[derive(Clone, Debug)]
pub struct OrRestriction {
    /// `None` exactly at the two free variables.
    pub assignment: Vec<Option<bool>>,
    /// The free variable pair, ascending.
    pub free: (usize, usize),
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum RestrictionError {
    #[error("function is not monotone")]
    NotMonotone,
    #[error("function is constant")]
    Constant,
    #[error("function is a conjunction of {0} and has no OR restriction")]
    Conjunction(AgentSet),
    #[error("function must have at least two inputs")]
    TooFewInputs,
}

fn eligible(f: &BoolFn) -> bool {
    f.constant_value().is_none() && f.conjunction_set().is_none()
}

/// Finds an assignment to `n - 2` variables turning a monotone,
/// non-constant, non-conjunction function into the disjunction of the two
/// remaining variables.
///
/// Walks the recursion `f = g·x + h` with `h = f|x=0`, `g = f|x=1`: recurse
/// into whichever branch is still neither constant nor a conjunction, and
/// otherwise read the answer off the two conjunctions.
pub fn find_or_restriction(f: &BoolFn) -> Result<OrRestriction, RestrictionError> {
    if f.n() < 2 {
        return Err(RestrictionError::TooFewInputs);
    }
    if !f.is_monotone() {
        return Err(RestrictionError::NotMonotone);
    }
    if f.constant_value().is_some() {
        return Err(RestrictionError::Constant);
    }
    if let Some(set) = f.conjunction_set() {
        return Err(RestrictionError::Conjunction(set));
    }

    let mut assignment: Vec<Option<bool>> = vec![None; f.n()];
    // live[k] = original index of the current function's variable k
    let mut live: Vec<usize> = (0..f.n()).collect();
    let mut current = f.clone();

    loop {
        let pivot = (0..current.n())
            .find(|i| current.depends_on(*i))
            .expect("a non-constant function depends on some variable");
        let h = current.restrict(pivot, false);
        let g = current.restrict(pivot, true);
        if eligible(&h) {
            assignment[live[pivot]] = Some(false);
            live.remove(pivot);
            current = h;
        } else if eligible(&g) {
            assignment[live[pivot]] = Some(true);
            live.remove(pivot);
            current = g;
        } else {
            // both restrictions are conjunctions; the proof guarantees a
            // variable in h's conjunction that is missing from g's
            let h_set = h.conjunction_set().expect("leaf branch must be a conjunction");
            let g_set = g.conjunction_set().expect("leaf branch must be a conjunction");
            let j_local = h_set
                .iter()
                .find(|j| !g_set.contains(*j))
                .expect("h's conjunction strictly contains g's");
            // indices in h refer to `current` with `pivot` removed
            let j_current = if j_local >= pivot { j_local + 1 } else { j_local };
            let first = live[pivot];
            let second = live[j_current];
            for (k, orig) in live.iter().enumerate() {
                if k != pivot && k != j_current {
                    assignment[*orig] = Some(true);
                }
            }
            let free = if first < second { (first, second) } else { (second, first) };
            return Ok(OrRestriction { assignment, free });
        }
    }
}

/// Applies an [`OrRestriction`] to the original function and returns the
/// 4-entry truth table over the free pair, index `b0 + 2*b1`.
pub fn restricted_pair_table(f: &BoolFn, r: &OrRestriction) -> [bool; 4] {
    let mut out = [false; 4];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut mask = 0u32;
        for (i, a) in r.assignment.iter().enumerate() {
            let value = match a {
                Some(v) => *v,
                None if i == r.free.0 => idx & 1 == 1,
                None => idx >> 1 & 1 == 1,
            };
            if value {
                mask |= 1 << i;
            }
        }
        *slot = f.eval(mask);
    }
    out
}

// ---------------------------------------------------------------------------
// structured technologies
// ---------------------------------------------------------------------------

/// Parameters of a structured technology: the Boolean function plus each
/// agent's task success probabilities with and without effort.
#[derive(Clone, Debug)]
pub struct StructuredParams<T> {
    pub f: BoolFn,
    pub gamma: Vec<T>,
    pub delta: Vec<T>,
    pub costs: Vec<T>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum StructuredError {
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("agent {}: need 0 <= gamma < delta <= 1, got gamma={gamma} delta={delta}", agent + 1)]
    BadProbabilities { agent: usize, gamma: String, delta: String },
    #[error(transparent)]
    Invalid(#[from] ValidationReport),
}

impl<T: Scalar> StructuredParams<T> {
    pub fn new(
        f: BoolFn,
        gamma: Vec<T>,
        delta: Vec<T>,
        costs: Vec<T>,
    ) -> Result<Self, StructuredError> {
        let n = f.n();
        for (name, list) in [("gamma", &gamma), ("delta", &delta), ("costs", &costs)] {
            let _ = name;
            if list.len() != n {
                return Err(StructuredError::ParamCount { expected: n, got: list.len() });
            }
        }
        for i in 0..n {
            let ok = gamma[i] >= T::zero()
                && gamma[i] < T::one()
                && delta[i] > gamma[i]
                && delta[i] <= T::one();
            if !ok {
                return Err(StructuredError::BadProbabilities {
                    agent: i,
                    gamma: format!("{}", gamma[i]),
                    delta: format!("{}", delta[i]),
                });
            }
        }
        Ok(StructuredParams { f, gamma, delta, costs })
    }
}

/// Builds the success table of a structured technology: `t(a)` is the
/// probability that `f` is 1 when task `i` succeeds with probability
/// `δ_i` (if `a_i = 1`) or `γ_i` (if `a_i = 0`).
///
/// One contraction pass per agent turns the truth table into the full
/// `2^n`-entry success table in `O(n 2^n)`; the result must still pass
/// technology validation (e.g. an AND with some `γ_i = 0` is rejected).
pub fn build_structured<T: Scalar>(
    params: &StructuredParams<T>,
) -> Result<Technology<T>, StructuredError> {
    let n = params.f.n();
    assert!(n <= 16, "structured construction capped at 16 agents");
    let size = 1usize << n;
    // buf starts as the truth table; after processing agent i its bit holds
    // the effort decision a_i instead of the task outcome x_i
    let mut buf: Vec<T> =
        params.f.truth().iter().map(|b| if *b { T::one() } else { T::zero() }).collect();
    for i in 0..n {
        let bit = 1usize << i;
        let gamma = params.gamma[i].clone();
        let delta = params.delta[i].clone();
        let co_gamma = T::one() - gamma.clone();
        let co_delta = T::one() - delta.clone();
        for mask in 0..size {
            if mask & bit != 0 {
                continue;
            }
            let fail = buf[mask].clone();
            let succeed = buf[mask | bit].clone();
            buf[mask] = co_gamma.clone() * fail.clone() + gamma.clone() * succeed.clone();
            buf[mask | bit] = co_delta.clone() * fail + delta.clone() * succeed;
        }
    }
    Ok(Technology::new(params.costs.clone(), buf)?)
}

/// Theorem-style embedding that gives any eligible Boolean function a
/// structured technology with a non-trivial POP: the two free variables of
/// an OR restriction get the worst known OR parameters, assigned-1 variables
/// succeed almost surely (`δ = 1-ε`, `γ = 1-2ε`), assigned-0 variables
/// almost surely fail (`δ = 2ε`, `γ = ε`), and all costs are 1.
pub fn build_nontrivial_pop_instance<T: Scalar>(
    f: &BoolFn,
    epsilon: f64,
) -> Result<StructuredParams<T>, RestrictionError> {
    assert!(epsilon > 0.0 && epsilon <= 0.01, "epsilon must lie in (0, 0.01]");
    let restriction = find_or_restriction(f)?;
    let n = f.n();
    let mut gamma = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for i in 0..n {
        match restriction.assignment[i] {
            None => {
                gamma.push(lit(0.0001));
                delta.push(lit(0.9));
            }
            Some(true) => {
                gamma.push(lit(1.0 - 2.0 * epsilon));
                delta.push(lit(1.0 - epsilon));
            }
            Some(false) => {
                gamma.push(lit(epsilon));
                delta.push(lit(2.0 * epsilon));
            }
        }
    }
    let costs = vec![T::one(); n];
    Ok(StructuredParams::new(f.clone(), gamma, delta, costs)
        .expect("embedding parameters are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed::solve_mixed;
    use crate::pure::solve_pure;
    use crate::technology::tests::{and_table, or_table};

    fn structured(f: BoolFn, gamma: f64, delta: f64) -> Technology<f64> {
        let n = f.n();
        let params =
            StructuredParams::new(f, vec![gamma; n], vec![delta; n], vec![1.0; n]).unwrap();
        build_structured(&params).unwrap()
    }

    #[test]
    fn parse_and_evaluate_formulas() {
        let f = BoolFn::parse_formula(3, "(x1 & x2) | x3").unwrap();
        assert!(f.eval(0b100));
        assert!(f.eval(0b011));
        assert!(!f.eval(0b001));
        assert!(f.is_monotone());

        assert!(BoolFn::parse_formula(2, "x1 &").is_err());
        assert!(BoolFn::parse_formula(2, "x9").unwrap_err().msg.contains("exceeds"));
        assert!(BoolFn::parse_formula(2, "x1 ^ x2").is_err());
    }

    #[test]
    fn conjunction_detection() {
        let f = BoolFn::parse_formula(3, "x1 & x3").unwrap();
        assert_eq!(f.conjunction_set(), Some(AgentSet(0b101)));

        let g = BoolFn::parse_formula(2, "x1 | x2").unwrap();
        assert_eq!(g.conjunction_set(), None);

        let one = BoolFn::from_table(2, vec![true; 4]).unwrap();
        assert_eq!(one.conjunction_set(), Some(AgentSet::EMPTY));
        let zero = BoolFn::from_table(2, vec![false; 4]).unwrap();
        assert_eq!(zero.conjunction_set(), None);
    }

    #[test]
    fn monotonicity_detection() {
        // f(011) = 1 and f(111) = 0 is not monotone
        let mut truth = vec![false; 8];
        truth[0b011] = true;
        let f = BoolFn::from_table(3, truth).unwrap();
        assert!(!f.is_monotone());
        assert!(matches!(find_or_restriction(&f), Err(RestrictionError::NotMonotone)));
    }

    #[test]
    fn or_restriction_base_case() {
        let f = BoolFn::disjunction(2);
        let r = find_or_restriction(&f).unwrap();
        assert_eq!(r.free, (0, 1));
        assert!(r.assignment.iter().all(|a| a.is_none()));
        assert_eq!(restricted_pair_table(&f, &r), [false, true, true, true]);
    }

    #[test]
    fn or_restriction_and_or_mix() {
        let f = BoolFn::parse_formula(3, "(x1 & x2) | x3").unwrap();
        let r = find_or_restriction(&f).unwrap();
        assert_eq!(restricted_pair_table(&f, &r), [false, true, true, true]);
    }

    #[test]
    fn or_restriction_exhaustive_small_arities() {
        for n in 2..=4usize {
            let size = 1usize << n;
            let mut eligible_count = 0usize;
            for code in 0u32..1u32 << size {
                let truth: Vec<bool> = (0..size).map(|k| code >> k & 1 == 1).collect();
                let f = BoolFn::from_table(n, truth).unwrap();
                if !f.is_monotone() || !eligible(&f) {
                    continue;
                }
                eligible_count += 1;
                let r = find_or_restriction(&f).unwrap();
                assert_eq!(
                    restricted_pair_table(&f, &r),
                    [false, true, true, true],
                    "bad restriction for {f:?}"
                );
            }
            assert!(eligible_count > 0);
        }
    }

    #[test]
    fn structured_matches_closed_forms() {
        let and = structured(BoolFn::conjunction(2), 0.1, 0.9);
        assert!((and.eval_pure(AgentSet(0b11)) - 0.81).abs() < 1e-15);
        assert!((and.eval_pure(AgentSet(0b00)) - 0.01).abs() < 1e-15);
        let closed = and_table(&[0.1, 0.1], &[0.9, 0.9]);
        for (got, want) in and.table().iter().zip(closed) {
            assert!((got - want).abs() <= 1e-12);
        }

        let or = structured(BoolFn::disjunction(2), 0.09, 0.91);
        let closed = or_table(&[0.09, 0.09], &[0.91, 0.91]);
        for (got, want) in or.table().iter().zip(closed) {
            assert!((got - want).abs() <= 1e-12);
        }
        assert!((or.eval_pure(AgentSet(0b00)) - 0.1719).abs() < 1e-12);
    }

    #[test]
    fn structured_majority_value() {
        let maj = BoolFn::parse_formula(3, "(x1 & x2) | (x1 & x3) | (x2 & x3)").unwrap();
        let tech = structured(maj, 0.2, 0.8);
        // enumeration oracle: sum over the four majority-true bit patterns
        let p = [0.8, 0.8, 0.2]; // a = (1,1,0)
        let mut expect = 0.0;
        for x in 0..8u32 {
            if x.count_ones() >= 2 {
                let mut w = 1.0;
                for i in 0..3 {
                    w *= if x >> i & 1 == 1 { p[i] } else { 1.0 - p[i] };
                }
                expect += w;
            }
        }
        assert!((expect - 0.704).abs() < 1e-12);
        assert!((tech.eval_pure(AgentSet(0b011)) - expect).abs() < 1e-12);
    }

    #[test]
    fn structured_rejects_bad_parameters() {
        let f = BoolFn::disjunction(2);
        assert!(matches!(
            StructuredParams::new(f.clone(), vec![0.5, 0.5], vec![0.4, 0.9], vec![1.0, 1.0]),
            Err(StructuredError::BadProbabilities { agent: 0, .. })
        ));
        // AND with gamma = 0 has t(emptyset) = 0 and fails validation
        let and = BoolFn::conjunction(2);
        let params =
            StructuredParams::new(and, vec![0.0, 0.1], vec![0.9, 0.9], vec![1.0, 1.0]).unwrap();
        assert!(matches!(build_structured(&params), Err(StructuredError::Invalid(_))));
    }

    #[test]
    fn embedding_or2_recovers_section3_parameters() {
        let params = build_nontrivial_pop_instance::<f64>(&BoolFn::disjunction(2), 1e-3).unwrap();
        assert_eq!(params.gamma, vec![0.0001, 0.0001]);
        assert_eq!(params.delta, vec![0.9, 0.9]);
        assert_eq!(params.costs, vec![1.0, 1.0]);
    }

    #[test]
    fn embedding_gives_nontrivial_ratio_at_v233() {
        for formula in ["(x1 & x2) | x3", "(x1 & x2) | (x1 & x3) | (x2 & x3)"] {
            let f = BoolFn::parse_formula(3, formula).unwrap();
            let params = build_nontrivial_pop_instance::<f64>(&f, 1e-3).unwrap();
            let tech = build_structured(&params).unwrap();
            let mixed = solve_mixed(&tech, 233.0).unwrap();
            let pure = solve_pure(&tech, 233.0);
            let ratio = mixed.utility / pure.utility;
            assert!(ratio > 1.01, "ratio {ratio} for {formula}");
        }
    }
}
