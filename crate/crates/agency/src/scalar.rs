//! Scalar abstraction for the numeric core.
//!
//! Table evaluation, envelopes and reliability only need field arithmetic
//! and ordering, so they are generic over [`Scalar`] and can run on exact
//! rationals as well as floats. The iterative solvers need transcendental
//! operations and are bounded by [`Real`] (`f32`/`f64`).

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num};

/// Field arithmetic with a total-enough order and conversion from `f64`
/// literals. Implemented by `f32`, `f64` and `num_rational::BigRational`.
pub trait Scalar:
    Num + Clone + PartialOrd + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Num + Clone + PartialOrd + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Floating-point scalar for the iterative solvers.
pub trait Real: Scalar + Float {}

impl<T> Real for T where T: Scalar + Float {}

/// Converts an `f64` literal into the working scalar type.
///
/// For rational scalars the conversion is exact (every finite double is a
/// dyadic rational).
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 literal must convert")
}
