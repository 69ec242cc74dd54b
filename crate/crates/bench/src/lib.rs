//! Shared fixtures for the benchmarks.

use std::path::PathBuf;

use tdirac_core::geometry::{load_model, ModelSpec};

/// Loads one of the bundled model files by name.
pub fn fixture(name: &str) -> ModelSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(format!("{name}.json"));
    load_model(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
