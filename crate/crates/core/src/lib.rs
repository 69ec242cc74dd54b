//! Exact verification engine for transverse Dirac operators on homogeneous
//! foliated models.

pub mod clifford;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod scalar;
pub mod spectral;
pub mod weitzenbock;

pub use error::{Error, Result};
pub use linalg::{FiberEndo, SurdMatrix};
pub use scalar::{Cx, Scalar, Surd};
