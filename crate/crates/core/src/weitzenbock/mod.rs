//! Normal-ordered calculus of invariant differential operators and the
//! Weitzenböck identities.

mod builders;
mod diffop;
mod setup;
mod suite;

pub use builders::*;
pub use diffop::DiffOp;
pub use setup::{derivation_lift, exact_line_curvature, line_curvature, FiberBundleSetup, FiberKind, Word};
pub use suite::{
    dirac_structure, verify_endo, verify_identity, verify_suite, DiracStructure, IdentityReport, IdentityResidual,
    MonomialResidual, Status, SuiteConfig, SuiteReport,
};
