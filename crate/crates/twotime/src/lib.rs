//! Pre- and post-selected quantum states over labeled wire tensors.
//!
//! Two-time states assign probabilities to intermediate operations by the
//! bullet composition rule. This crate builds the tensor calculus, the
//! standard processes (identities, throw-away-and-replace, measure-and-prepare
//! measurements), the no-backwards-in-time-signalling witnesses for each
//! timing structure, the linearity conditions, and the bridge that turns a
//! state plus local strategies into a conditional-probability behavior for
//! the exact polytope machinery.

pub mod bridge;
pub mod checks;
pub mod ops;
pub mod states;
pub mod tensor;

pub use tensor::{LabeledTensor, Side, TensorError, Variance, WireIndex};

/// Default tolerance for all floating-point tensor checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Standard wire names: party label (A/B) followed by stage 1 (lab input),
/// 2 (between measurement and transformation), 3 (lab output).
pub mod wires {
    pub const A1: &str = "A1";
    pub const A2: &str = "A2";
    pub const A3: &str = "A3";
    pub const B1: &str = "B1";
    pub const B2: &str = "B2";
    pub const B3: &str = "B3";
}
