//! Exact-arithmetic toolkit for no-backwards-in-time-signalling (NBTS)
//! correlations.
//!
//! The crate builds conditional-probability *behaviors* p(a⃗|x⃗) over declared
//! scenarios, emits the linear constraint systems that carve out the NBTS and
//! classical polytopes for the three timing regimes (indefinite, parallel,
//! sequential), enumerates their vertices exactly, and decomposes classical
//! behaviors into explicit convex mixtures of deterministic one-way vertices.
//!
//! All polytope-side arithmetic is exact: probabilities are arbitrary-precision
//! rationals and every dimension, vertex count and membership verdict is an
//! exact statement, never a tolerance check. The numeric kernel is generic over
//! the scalar type (see [`scalar`]); the crate-root aliases pin the shipped
//! instantiations.

pub mod behavior;
pub mod catalog;
pub mod constraints;
pub mod decompose;
pub mod linalg;
pub mod polytope;
pub mod scalar;
pub mod scenario;
pub mod simplex;

/// Arbitrary-precision rational, the scalar of every exact computation.
pub type Q = num_rational::BigRational;

/// Exact rational vector (a point in behavior space).
pub type QVec = Vec<Q>;

/// Behavior with exact rational entries (the default lane).
pub type Behavior = behavior::Behavior<Q>;

pub use behavior::{mix, BehaviorError, ClassicalityReport, Marginal, NbtsReport};
pub use catalog::{ClassicalVertex, VertexFamily};
pub use constraints::{HPolytope, LinearConstraint, Relation};
pub use decompose::{ConvexDecomposition, PeelCase, PeelStep};
pub use polytope::{MembershipCertificate, PolytopeError, Separator, VPolytope};
pub use scenario::{CoordinateIndex, Scenario, TimingRegime};

/// Exact 1/2, handy for the PR-like and linear-correlation tables.
pub fn half() -> Q {
    use num_traits::One;
    Q::new(num_bigint::BigInt::one(), num_bigint::BigInt::from(2))
}

/// Parse a rational from the JSON wire format: `"num/den"`, `"n"`, or a bare
/// JSON integer. Floating-point tokens are rejected.
pub fn parse_rational(value: &serde_json::Value) -> Result<Q, String> {
    use num_traits::One;
    match value {
        serde_json::Value::String(s) => s
            .trim()
            .parse::<Q>()
            .map_err(|e| format!("bad rational {s:?}: {e}")),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Q::new(i.into(), num_bigint::BigInt::one()))
            } else {
                Err(format!("non-integer numeric literal {n} (use \"num/den\")"))
            }
        }
        other => Err(format!("expected rational, got {other}")),
    }
}

/// Render a rational for the JSON wire format (`"num/den"`, or `"n"` when the
/// denominator is one).
pub fn rational_to_json(q: &Q) -> serde_json::Value {
    serde_json::Value::String(q.to_string())
}
