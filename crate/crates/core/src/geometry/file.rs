//! JSON model files.
//!
//! ```json
//! { "name": "heisenberg", "p": 1, "q": 2,
//!   "brackets": [[2, 3, 1, "1"]],
//!   "J": [["0", "-1"], ["1", "0"]],
//!   "line_bundle": { "B": [["0", "-1i"], ["1i", "0"]], "scale": "2pi" },
//!   "twist_dim": 1 }
//! ```
//!
//! Indices are 1-based with leaf directions first; `[i, j, k, v]` means the
//! `u_k`-component of `[u_i, u_j]` is `v`.

use std::path::Path;

use serde::{Deserialize, Deserializer};

use super::connection::{ConnectionData, Mutation};
use super::model::FrameModel;
use crate::clifford::{ComplexStructure, TwoForm};
use crate::error::{Error, Result};
use crate::linalg::SurdMatrix;
use crate::scalar::{Cx, Surd};

pub(crate) fn de_surd<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Surd, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    p: usize,
    q: usize,
    #[serde(default)]
    brackets: Vec<(usize, usize, usize, String)>,
    line_bundle: Option<RawLineBundle>,
    #[serde(rename = "J")]
    j: Option<Vec<Vec<String>>>,
    twist_dim: Option<usize>,
    mutation: Option<Mutation>,
    description: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLineBundle {
    #[serde(rename = "B")]
    b: Vec<Vec<String>>,
    scale: Option<String>,
}

/// Unit in which line-bundle curvature entries are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxScale {
    Unit,
    /// Entries are multiples of 2π.
    TwoPi,
}

impl FluxScale {
    pub fn factor(self) -> f64 {
        match self {
            FluxScale::Unit => 1.0,
            FluxScale::TwoPi => std::f64::consts::TAU,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineBundle {
    /// Curvature `R^L(f_α, f_β)` in units of `scale`.
    pub b: TwoForm,
    pub scale: FluxScale,
}

/// Parsed model file.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub model: FrameModel,
    pub description: Option<String>,
    pub j: Option<ComplexStructure>,
    pub line_bundle: Option<LineBundle>,
    pub twist_dim: usize,
    pub mutation: Option<Mutation>,
}

impl ModelSpec {
    /// The declared `J`, or the standard one.
    pub fn complex_structure(&self) -> Result<ComplexStructure> {
        match &self.j {
            Some(j) => Ok(j.clone()),
            None => ComplexStructure::standard(self.model.q()),
        }
    }

    /// Validates the model, derives its geometry and applies the declared
    /// mutation, if any.
    pub fn connection_data(&self) -> Result<ConnectionData> {
        let data = ConnectionData::derive(&self.model)?;
        match &self.mutation {
            Some(m) => data.apply(m),
            None => Ok(data),
        }
    }
}

fn parse_matrix<T>(rows: &[Vec<String>], q: usize, what: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<Vec<T>>> {
    if rows.len() != q || rows.iter().any(|r| r.len() != q) {
        return Err(Error::InvalidModel(format!("{what} must be {q}×{q}")));
    }
    rows.iter().map(|r| r.iter().map(|s| f(s)).collect()).collect()
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = raw.p + raw.q;
    let mut brackets = Vec::with_capacity(raw.brackets.len());
    for (i, j, k, v) in &raw.brackets {
        if [i, j, k].iter().any(|&&x| x == 0 || x > n) {
            return Err(Error::InvalidModel(format!("bracket [{i}, {j}, {k}] outside 1..={n}")));
        }
        brackets.push((i - 1, j - 1, k - 1, v.parse::<Surd>()?));
    }
    let model = FrameModel::from_brackets(&raw.name, raw.p, raw.q, &brackets)?;
    let j = match &raw.j {
        None => None,
        Some(rows) => {
            let m = parse_matrix(rows, raw.q, "J", |s| s.parse::<Surd>())?;
            Some(ComplexStructure::new(SurdMatrix::from_fn(raw.q, |r, c| m[r][c].clone()))?)
        }
    };
    let line_bundle = match raw.line_bundle {
        None => None,
        Some(lb) => {
            let entries = parse_matrix(&lb.b, raw.q, "B", |s| s.parse::<Cx>())?;
            let scale = match lb.scale.as_deref() {
                None | Some("1") => FluxScale::Unit,
                Some("2pi") | Some("2π") => FluxScale::TwoPi,
                Some(other) => return Err(Error::InvalidModel(format!("unknown scale {other:?}"))),
            };
            Some(LineBundle { b: TwoForm::from_entries(&entries)?, scale })
        }
    };
    if raw.twist_dim == Some(0) {
        return Err(Error::InvalidModel("twist_dim must be positive".into()));
    }
    Ok(ModelSpec {
        model,
        description: raw.description,
        j,
        line_bundle,
        twist_dim: raw.twist_dim.unwrap_or(1),
        mutation: raw.mutation,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_schema() {
        let spec = parse_model(
            r#"{ "name": "h", "p": 1, "q": 2, "brackets": [[2, 3, 1, "1"]],
                 "J": [["0", "-1"], ["1", "0"]],
                 "line_bundle": { "B": [["0", "-1i"], ["1i", "0"]], "scale": "2pi" },
                 "twist_dim": 2,
                 "mutation": { "kind": "tau", "index": 1, "delta": "1/2" } }"#,
        )
        .unwrap();
        assert_eq!(spec.model.c(1, 2, 0), &Surd::one());
        assert_eq!(spec.twist_dim, 2);
        let lb = spec.line_bundle.unwrap();
        assert_eq!(lb.scale, FluxScale::TwoPi);
        assert_eq!(lb.b.entry(0, 1), Cx::imag(-Surd::one()));
        assert_eq!(spec.mutation, Some(Mutation::Tau { index: 1, delta: Surd::from_ratio(1, 2) }));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_model("{"), Err(Error::Parse(_))));
        let e = parse_model(r#"{ "name": "x", "p": 1, "q": 2, "brackets": [[1, 4, 1, "1"]] }"#);
        assert!(matches!(e, Err(Error::InvalidModel(_))));
        let e = parse_model(r#"{ "name": "x", "p": 1, "q": 2, "line_bundle": { "B": [["0", "1"], ["-1", "0"]] } }"#);
        assert!(matches!(e, Err(Error::NotSkew(_))));
    }
}
