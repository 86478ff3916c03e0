//! Solvers for combinatorial agency under hidden actions.
//!
//! Given a technology (a success probability for every pure effort profile
//! plus per-agent effort costs), this crate computes optimal pure and mixed
//! contracts, the price of purity and the price of unaccountability,
//! returns-to-scale classification, strong-equilibrium robustness, and
//! structured technologies built from monotone Boolean functions or
//! read-once source-sink networks. Everything is cross-validated against
//! brute-force oracles in the test suites.
//!
//! The numeric core is generic over the scalar type: floats for the
//! iterative solvers, exact rationals where exactness matters (e.g. network
//! reliability). Concrete `f64` aliases live at the crate root.

pub mod boolfn;
pub mod mixed;
pub mod pure;
pub mod purity;
pub mod scalar;
pub mod technology;

pub use boolfn::{
    build_nontrivial_pop_instance, build_structured, find_or_restriction, restricted_pair_table,
    BoolFn, OrRestriction, RestrictionError, StructuredError, StructuredParams,
};
pub use mixed::{
    agent_utility, grid_oracle_mixed, indifference_payment, payment_bounds_check,
    principal_utility_mixed, solve_mixed, solve_mixed_with, strong_eq_check, verify_mixed_nash,
    CoalitionDeviation, DeviationScope, MixedContract, PaymentBounds, SolveError, SolveOpts,
    StrongEqVerdict, DEFAULT_SEED,
};
pub use pure::{
    observable_envelope, payment_pure, pou, pure_envelope, solve_observable, solve_pure,
    total_payment_pure, transition_points, utility_pure, verify_pure_nash, Envelope,
    EnvelopePiece, PouResult, PureContract,
};
pub use purity::{
    anonymous_or_parameters, check_bounds, pop, pop_bound_general, pop_bound_n, pop_bound_or,
    pop_bound_two, pop_with, BoundCheck, PurityReport,
};
pub use scalar::{Real, Scalar};
pub use technology::{
    AgentSet, MixedProfile, ReturnsClass, ReturnsClassification, Technology, ValidationReport,
    Violation, MAX_AGENTS,
};

/// `f64` technology, the default working type.
pub type Technology64 = Technology<f64>;
/// `f64` mixed profile.
pub type MixedProfile64 = MixedProfile<f64>;
/// `f64` pure-contract envelope.
pub type Envelope64 = Envelope<f64>;
/// `f64` pure contract.
pub type PureContract64 = PureContract<f64>;
/// `f64` mixed contract.
pub type MixedContract64 = MixedContract<f64>;
