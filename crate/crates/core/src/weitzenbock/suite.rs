//! Identity checking and the full verification suite.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::builders::*;
use super::diffop::DiffOp;
use super::setup::{exact_line_curvature, FiberBundleSetup};
use crate::clifford::{ComplexStructure, TwoForm};
use crate::error::Result;
use crate::geometry::{ConnectionData, ModelSpec};
use crate::linalg::FiberEndo;
use crate::scalar::{Cx, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonomialResidual {
    pub monomial: String,
    pub residual: f64,
}

/// Per-monomial comparison of two operators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    /// Whether every coefficient of `lhs − rhs` vanishes identically.
    pub exact_zero: bool,
    /// Largest entry of any coefficient of `lhs − rhs`.
    pub max: f64,
    /// Monomials with a nonzero difference.
    pub monomials: Vec<MonomialResidual>,
}

impl IdentityResidual {
    fn merge(mut self, o: IdentityResidual) -> Self {
        self.exact_zero &= o.exact_zero;
        self.max = self.max.max(o.max);
        self.monomials.extend(o.monomials);
        self
    }
}

pub fn verify_identity<S: Scalar>(lhs: &DiffOp<S>, rhs: &DiffOp<S>) -> Result<IdentityResidual> {
    let diff = lhs.sub(rhs)?;
    let monomials: Vec<MonomialResidual> = diff
        .terms()
        .iter()
        .map(|(w, e)| MonomialResidual { monomial: diff.word_label(w), residual: e.max_abs() })
        .collect();
    Ok(IdentityResidual {
        exact_zero: diff.is_zero(),
        max: monomials.iter().map(|m| m.residual).fold(0.0, f64::max),
        monomials,
    })
}

/// Comparison of two constant endomorphisms, reported as degree-zero.
pub fn verify_endo<S: Scalar>(lhs: &FiberEndo<S>, rhs: &FiberEndo<S>) -> IdentityResidual {
    let d = lhs.sub(rhs);
    let exact_zero = d.is_zero();
    let max = d.max_abs();
    let monomials = if exact_zero { Vec::new() } else { vec![MonomialResidual { monomial: "1".into(), residual: max }] };
    IdentityResidual { exact_zero, max, monomials }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub label: &'static str,
    pub name: &'static str,
    pub fiber: &'static str,
    /// Reported-only items do not affect the verdict.
    pub asserted: bool,
    pub status: Status,
    pub exact_zero: bool,
    pub residual: String,
    pub monomials: Vec<MonomialResidual>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub model: String,
    pub k: i64,
    pub twist_dim: usize,
    pub items: Vec<IdentityReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| !i.asserted || i.status != Status::Fail)
    }

    pub fn item(&self, label: &str) -> Option<&IdentityReport> {
        self.items.iter().find(|i| i.label == label)
    }
}

/// Bundle data for the spinor part of the suite.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub j: ComplexStructure,
    /// Formal line-bundle curvature `R^L`, used as `k·R^L`.
    pub line: Option<TwoForm>,
    pub k: i64,
    pub twist_dim: usize,
}

impl SuiteConfig {
    pub fn new(j: ComplexStructure) -> Self {
        SuiteConfig { j, line: None, k: 0, twist_dim: 1 }
    }

    /// Bundle data declared by a model file, with `k` copies of its line
    /// bundle (`k = 1` when the file declares one).
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        Ok(SuiteConfig {
            j: spec.complex_structure()?,
            line: spec.line_bundle.as_ref().map(|l| l.b.clone()),
            k: i64::from(spec.line_bundle.is_some()),
            twist_dim: spec.twist_dim,
        })
    }
}

fn render(r: &IdentityResidual) -> String {
    if r.exact_zero {
        "0".into()
    } else {
        format!("{:.6e}", r.max)
    }
}

fn report(label: &'static str, name: &'static str, fiber: &'static str, asserted: bool, r: IdentityResidual) -> IdentityReport {
    IdentityReport {
        label,
        name,
        fiber,
        asserted,
        status: if r.exact_zero { Status::Pass } else { Status::Fail },
        exact_zero: r.exact_zero,
        residual: render(&r),
        monomials: r.monomials,
        note: None,
    }
}

type Item<'a> = Box<dyn Fn() -> Result<IdentityReport> + Send + Sync + 'a>;

/// Runs every identity on the spinor bundle Λ^{0,*}⊗ℂ^r⊗L^k and on the
/// horizontal forms.
pub fn verify_suite(data: &ConnectionData, config: &SuiteConfig) -> Result<SuiteReport> {
    let phi = match &config.line {
        Some(b) => Some(exact_line_curvature(data, b, config.k)?),
        None => None,
    };
    let sp: Arc<FiberBundleSetup<Cx>> = FiberBundleSetup::spinor(data, &config.j, config.twist_dim, phi)?;
    let fm: Arc<FiberBundleSetup<Cx>> = FiberBundleSetup::forms(data)?;
    let basic = data.tau_is_basic();

    let items: Vec<Item> = vec![
        Box::new(|| {
            let d = build_dirac(&sp);
            let r = verify_identity(&d.compose(&d)?, &build_lichnerowicz_rhs(&sp)?)?;
            Ok(report("a", "Lichnerowicz formula for D²", "spinor", true, r))
        }),
        Box::new(|| {
            let d = build_dirac_prime(&sp);
            let r = verify_identity(&d.compose(&d)?, &build_dirac_prime_square_rhs(&sp)?)?;
            Ok(report("b", "square of D′ with the full curvature", "spinor", true, r))
        }),
        Box::new(|| {
            let d = build_dirac(&sp);
            let r = verify_identity(&d.compose(&d)?, &build_dirac_square_rhs(&sp)?)?;
            Ok(report("c", "square of D with the full curvature", "spinor", true, r))
        }),
        Box::new(|| {
            let p = sp.p();
            let lhs = clifford_curvature_contraction(&sp, |a, b| sp.curvature(p + a, p + b).clone());
            let k4 = Cx::from_surd(&sp.data.scalar_curvature).times(&Cx::from_ratio(1, 4));
            let rhs = clifford_curvature_contraction(&sp, |a, b| sp.twisting_curvature(a, b))
                .add(&FiberEndo::scalar(sp.dim(), k4));
            Ok(report("d", "curvature contraction equals K/4 plus twisting part", "spinor", true, verify_endo(&lhs, &rhs)))
        }),
        Box::new(|| {
            let r = verify_identity(&build_delta_h(&fm)?, &build_bochner_rhs(&fm)?)?;
            Ok(report("e", "Bochner formula for the transverse Laplacian", "forms", true, r))
        }),
        Box::new(|| {
            let d = build_dh(&fm)?;
            let ds = build_dh_star(&fm)?;
            let r1 = verify_identity(&d.compose(&d)?, &build_dh_square_rhs(&fm)?)?;
            let r2 = verify_identity(&ds.compose(&ds)?, &build_dh_star_square_rhs(&fm)?)?;
            Ok(report("f", "squares of d_H and d_H*", "forms", true, r1.merge(r2)))
        }),
        Box::new(|| {
            let r = verify_identity(&build_dirac(&fm), &build_forms_dirac_rhs(&fm)?)?;
            Ok(report("g", "Dirac operator on forms via d_H and d_H*", "forms", true, r))
        }),
        Box::new(|| {
            let zero = FiberEndo::zeros(fm.dim());
            let r = verify_endo(&forms_curvature_contraction(&fm, true)?, &zero)
                .merge(verify_endo(&forms_curvature_contraction(&fm, false)?, &zero));
            let mut rep = report("h", "exterior and interior curvature contractions vanish", "forms", false, r);
            rep.note = Some("reported per model, not asserted".into());
            Ok(rep)
        }),
        Box::new(|| {
            if !basic {
                return Ok(IdentityReport {
                    label: "i",
                    name: "Lichnerowicz formula for basic mean curvature",
                    fiber: "spinor",
                    asserted: true,
                    status: Status::Skipped,
                    exact_zero: false,
                    residual: "-".into(),
                    monomials: Vec::new(),
                    note: Some("τ is not basic: dτ ≠ 0".into()),
                });
            }
            let d = build_dirac(&sp);
            let r = verify_identity(&d.compose(&d)?, &build_lichnerowicz_rhs_basic(&sp)?)?;
            let mut rep = report("i", "Lichnerowicz formula for basic mean curvature", "spinor", true, r);
            rep.note = Some("τ basic".into());
            Ok(rep)
        }),
    ];
    let items: Vec<IdentityReport> = items.par_iter().map(|f| f()).collect::<Result<_>>()?;
    Ok(SuiteReport { model: data.model.name.clone(), k: config.k, twist_dim: config.twist_dim, items })
}

/// Structural checks on `D`: `D* − D` and whether every coefficient is odd
/// for the grading.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiracStructure {
    pub adjoint: IdentityResidual,
    pub odd: bool,
}

pub fn dirac_structure<S: Scalar>(setup: &Arc<FiberBundleSetup<S>>) -> Result<DiracStructure> {
    let d = build_dirac(setup);
    let adjoint = verify_identity(&d.adjoint()?, &d)?;
    let g = setup.grading();
    let odd = d.terms().values().all(|e| g.mul(e).add(&e.mul(g)).is_zero());
    Ok(DiracStructure { adjoint, odd })
}
