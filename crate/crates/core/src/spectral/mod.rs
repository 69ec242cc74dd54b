//! Magnetic lattice discretization of `D_k²` on flat-torus models and the
//! resulting spectra.

mod eigen;
mod lattice;
mod scan;
mod sparse;

pub use eigen::{dense_eigenvalues, eigen, lanczos, lanczos_detailed, LanczosOptions, LanczosOutcome, Solver, DENSE_LIMIT};
pub use lattice::{discretize, Lattice};
pub use scan::{
    analyze, cross_validate, crosscheck_suite, discretize_bochner, discretize_square, fitted_c, gap_scan, kernel_even,
    kernel_odd, bochner_bound, split_kernel, CrossResidual, CrossRow, GridConfig, BochnerBoundRow, LatticeOperator, SpectrumReport,
    TorusBundle,
};
pub use sparse::SparseMatrix;
