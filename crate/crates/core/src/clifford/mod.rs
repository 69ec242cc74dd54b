//! Exact Clifford and exterior algebra on a transverse fiber.

mod generator;
mod multivector;
mod spinor;
mod two_form;

pub use generator::{
    fiber_battery, random_compatible_pair, random_orthogonal, random_unitary, FiberBatteryReport,
    FiberFailure,
};
pub use multivector::{
    clifford_act, clifford_mul, exterior_matrices, lambda_action, quantize, symbol, CliffordElement,
    Multivector,
};
pub use spinor::{spinor_action, spinor_generators, ComplexStructure, SpinorFiber};
pub use two_form::{
    check_compatible, check_rl1, fiber_checks, fiber_eigenvalues, odd_lower_bound, rl1_residual, skew_invariants,
    two_form_action, OddBound, Rl1Report, SkewInvariants, TwoForm,
};
