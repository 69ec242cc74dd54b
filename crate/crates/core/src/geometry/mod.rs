//! Homogeneous foliated models and their transverse geometry.

mod connection;
pub(crate) mod file;
mod model;

pub use connection::{
    curvature, divergence, integrability_tensor, levi_civita, mean_curvature, scalar_curvature, spin_connection,
    spin_lift, transverse_connection, ConnectionData, Mutation,
};
pub use file::{load_model, parse_model, FluxScale, LineBundle, ModelSpec};
pub use model::{validate, Condition, FrameModel, ValidationReport, Violation};
