//! Scalar abstractions for the numeric kernel.
//!
//! Table and constraint arithmetic is generic so the same code serves the
//! exact rational lane and the floating-point lane that quantum strategies
//! produce. Algorithms that rely on exact zero tests (rank, simplex, vertex
//! enumeration, peeling) additionally require [`ExactField`], a marker that is
//! deliberately *not* blanket-implemented: implementing it asserts arithmetic
//! without rounding.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

/// Element of a behavior table or constraint row.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + Num {}

impl<T: Clone + PartialEq + std::fmt::Debug + Num> Scalar for T {}

/// Ordered field with exact arithmetic. `a == b` and `a < b` are exact
/// statements, so pivoting and zero detection never misclassify.
pub trait ExactField: Scalar + Signed + PartialOrd + std::fmt::Display {
    fn from_int(n: i64) -> Self;
}

impl ExactField for BigRational {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }
}

impl ExactField for Ratio<i64> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n)
    }
}

/// Scalars with a notion of magnitude, for deviation-style checks that make
/// sense in both lanes (exact deviations are compared to zero, float
/// deviations to a tolerance).
pub trait SignedScalar: Scalar + Signed + PartialOrd {}

impl<T: Scalar + Signed + PartialOrd> SignedScalar for T {}
