//! Landau-type spectra of `D_k²` on flat-torus models.

use std::ops::RangeInclusive;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::{eigen, Solver};
use super::lattice::{discretize, Lattice};
use super::sparse::SparseMatrix;
use crate::clifford::{skew_invariants, ComplexStructure};
use crate::error::{Error, Result};
use crate::geometry::{ConnectionData, FluxScale, LineBundle, ModelSpec};
use crate::scalar::{Scalar, Surd};
use crate::weitzenbock::*;

/// A flat-torus model with a line bundle, ready for discretization.
#[derive(Clone, Debug)]
pub struct TorusBundle {
    pub data: ConnectionData,
    pub j: ComplexStructure,
    pub line: Option<LineBundle>,
    pub twist_dim: usize,
}

impl TorusBundle {
    pub fn new(data: ConnectionData, j: ComplexStructure, line: Option<LineBundle>, twist_dim: usize) -> Result<Self> {
        if !data.model.is_abelian() {
            return Err(Error::NotTorus(format!("{} has nonzero structure constants", data.model.name)));
        }
        Ok(TorusBundle { data, j, line, twist_dim })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        if !spec.model.is_abelian() {
            return Err(Error::NotTorus(format!("{} has nonzero structure constants", spec.model.name)));
        }
        Self::new(spec.connection_data()?, spec.complex_structure()?, spec.line_bundle.clone(), spec.twist_dim)
    }

    /// First Chern numbers `(i/2π)∫F` of `L^k` over each transverse 2-torus,
    /// keyed by 1-based plane indices.
    pub fn chern_numbers(&self, k: i64) -> Result<Vec<(usize, usize, i64)>> {
        let q = self.data.q();
        let mut out = Vec::new();
        let Some(line) = &self.line else {
            return Ok((0..q).flat_map(|a| (a + 1..q).map(move |b| (a + 1, b + 1, 0))).collect());
        };
        let im = line.b.imag_part();
        for a in 0..q {
            for b in a + 1..q {
                let flux = &im.get(a, b).clone() * &Surd::from_int(-k);
                let c = match line.scale {
                    FluxScale::TwoPi => flux.clone(),
                    FluxScale::Unit if flux.is_zero() => flux.clone(),
                    FluxScale::Unit => return Err(Error::NonIntegerChern(flux.to_f64() / std::f64::consts::TAU, a + 1, b + 1)),
                };
                let int = c.is_rational().then(|| c.rat.clone()).filter(|r| r.is_integer());
                match int {
                    Some(r) => out.push((a + 1, b + 1, num_traits::ToPrimitive::to_i64(&r.to_integer()).unwrap_or(i64::MAX))),
                    None => return Err(Error::NonIntegerChern(c.to_f64(), a + 1, b + 1)),
                }
            }
        }
        Ok(out)
    }

    /// Spinor setup over `Λ^{0,*}⊗ℂ^r⊗L^k` in floating point.
    pub fn setup(&self, k: i64) -> Result<Arc<FiberBundleSetup<Complex64>>> {
        self.chern_numbers(k)?;
        let phi = match &self.line {
            Some(l) => Some(line_curvature(&self.data, &l.b, &Complex64::new(k as f64 * l.scale.factor(), 0.0))?),
            None => None,
        };
        FiberBundleSetup::spinor(&self.data, &self.j, self.twist_dim, phi)
    }

    pub fn forms_setup(&self) -> Result<Arc<FiberBundleSetup<Complex64>>> {
        FiberBundleSetup::forms(&self.data)
    }

    /// `(m, λ)` of the unit line bundle.
    pub fn invariants(&self) -> Result<(f64, f64)> {
        match &self.line {
            None => Ok((0.0, 0.0)),
            Some(l) => {
                let inv = skew_invariants(&l.b)?;
                Ok((inv.m.to_f64() * l.scale.factor(), inv.lambda.to_f64() * l.scale.factor()))
            }
        }
    }
}

/// Grid parameters shared by the spectral operations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub n: usize,
    /// 1 restricts to leafwise-constant sections.
    pub leaf_points: usize,
    /// Eigenvalues computed per grading sector.
    pub count: usize,
    pub solver: Solver,
    /// Random gauge transformation applied to the links, if any.
    pub gauge_seed: Option<u64>,
}

impl GridConfig {
    pub fn new(n: usize) -> Self {
        GridConfig { n, leaf_points: 1, count: 24, solver: Solver::Auto, gauge_seed: None }
    }
}

/// Discretized Hermitian operator with its fiber grading.
#[derive(Clone, Debug)]
pub struct LatticeOperator {
    pub k: i64,
    pub lattice: Lattice,
    pub matrix: SparseMatrix,
    pub fiber_dim: usize,
    /// `true` for odd fiber basis vectors.
    pub odd: Vec<bool>,
    /// Deviation from Hermitian symmetry before symmetrization.
    pub assembly_defect: f64,
}

impl LatticeOperator {
    pub fn assemble(op: &DiffOp<Complex64>, lattice: Lattice, k: i64) -> Result<Self> {
        let raw = discretize(op, &lattice)?;
        let setup = op.setup();
        let odd = (0..setup.dim()).map(|i| setup.grading().get(i, i).re < 0.0).collect();
        Ok(LatticeOperator {
            k,
            assembly_defect: raw.hermitian_defect(),
            matrix: raw.hermitian_part(),
            fiber_dim: setup.dim(),
            odd,
            lattice,
        })
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.matrix.hermitian_defect()
    }

    /// Block on the even (`odd = false`) or odd sections.
    pub fn sector(&self, odd: bool) -> SparseMatrix {
        let idx: Vec<usize> = (0..self.matrix.dim()).filter(|i| self.odd[i % self.fiber_dim] == odd).collect();
        self.matrix.restrict(&idx)
    }
}

fn lattice_for(setup: &FiberBundleSetup<Complex64>, grid: &GridConfig) -> Result<Lattice> {
    let l = Lattice::for_setup(setup, grid.n, grid.leaf_points)?;
    match grid.gauge_seed {
        Some(seed) => l.with_random_gauge(seed),
        None => Ok(l),
    }
}

/// `D_k²` realized through the Lichnerowicz right-hand side.
pub fn discretize_square(bundle: &TorusBundle, k: i64, grid: &GridConfig) -> Result<LatticeOperator> {
    let setup = bundle.setup(k)?;
    let rhs = build_lichnerowicz_rhs(&setup)?;
    LatticeOperator::assemble(&rhs, lattice_for(&setup, grid)?, k)
}

/// Bochner Laplacian `Δ^{V⊗L^k}` on the same bundle.
pub fn discretize_bochner(bundle: &TorusBundle, k: i64, grid: &GridConfig) -> Result<LatticeOperator> {
    let setup = bundle.setup(k)?;
    let op = build_bochner(&setup)?;
    LatticeOperator::assemble(&op, lattice_for(&setup, grid)?, k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub k: i64,
    pub n: usize,
    /// Lowest eigenvalues of both sectors, merged and sorted.
    pub eigenvalues: Vec<f64>,
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub gap: f64,
    pub two_km: f64,
    /// `max(0, 2km − gap)`.
    pub fitted_c: f64,
    pub kernel_dim_even: usize,
    pub kernel_dim_odd: usize,
    pub m: f64,
    pub lambda: f64,
    pub min_eigenvalue: f64,
    pub hermitian_defect: f64,
    pub runtime_ms: u64,
}

/// Splits a sorted spectrum into a kernel cluster and the rest: the gap is
/// the eigenvalue with the largest ratio to everything below it. Returns
/// `(kernel size, gap)`.
pub fn split_kernel(sorted: &[f64]) -> Result<(usize, f64)> {
    let spread = sorted.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let floor = 1e-9 * spread;
    let mut below = floor;
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, &e) in sorted.iter().enumerate() {
        let ratio = e / below;
        if e > 0.0 && best.map_or(true, |(_, _, r)| ratio > r) {
            best = Some((i, e, ratio));
        }
        below = below.max(e.abs());
    }
    match best {
        Some((i, gap, ratio)) if ratio >= 10.0 => Ok((i, gap)),
        _ => Err(Error::AmbiguousCluster(format!("no eigenvalue separates from those below it by 10×: {sorted:?}"))),
    }
}

/// Spectrum of `D_k²` split by grading, with kernel counts below `gap/10`.
pub fn analyze(bundle: &TorusBundle, k: i64, grid: &GridConfig) -> Result<SpectrumReport> {
    let start = Instant::now();
    let op = discretize_square(bundle, k, grid)?;
    let even = eigen(&op.sector(false), grid.count, grid.solver)?;
    let odd = eigen(&op.sector(true), grid.count, grid.solver)?;
    let mut all: Vec<f64> = even.iter().chain(&odd).copied().collect();
    all.sort_by(f64::total_cmp);
    let (_, gap) = split_kernel(&all)?;
    let cut = gap / 10.0;
    let kernel_dim_even = even.iter().filter(|&&e| e < cut).count();
    let kernel_dim_odd = odd.iter().filter(|&&e| e < cut).count();
    for (name, ev, kd) in [("even", &even, kernel_dim_even), ("odd", &odd, kernel_dim_odd)] {
        if kd == ev.len() && kd > 0 && ev.len() < op.sector(name == "odd").dim() {
            return Err(Error::AmbiguousCluster(format!("all {kd} computed {name} eigenvalues lie in the kernel cluster")));
        }
    }
    let (m, lambda) = bundle.invariants()?;
    let two_km = 2.0 * k as f64 * m;
    Ok(SpectrumReport {
        k,
        n: grid.n,
        min_eigenvalue: all[0],
        eigenvalues: all,
        even,
        odd,
        gap,
        two_km,
        fitted_c: (two_km - gap).max(0.0),
        kernel_dim_even,
        kernel_dim_odd,
        m,
        lambda: k as f64 * lambda,
        hermitian_defect: op.hermitian_defect(),
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// One report per `k`, in order; `k` values run concurrently.
pub fn gap_scan(bundle: &TorusBundle, ks: RangeInclusive<i64>, grid: &GridConfig) -> Result<Vec<SpectrumReport>> {
    let ks: Vec<i64> = ks.collect();
    ks.par_iter().map(|&k| analyze(bundle, k, grid)).collect()
}

/// `max(0, max_k (2km − gap_k))`.
pub fn fitted_c(reports: &[SpectrumReport]) -> f64 {
    reports.iter().map(|r| r.fitted_c).fold(0.0, f64::max)
}

pub fn kernel_odd(bundle: &TorusBundle, k: i64, grid: &GridConfig) -> Result<usize> {
    Ok(analyze(bundle, k, grid)?.kernel_dim_odd)
}

pub fn kernel_even(bundle: &TorusBundle, k: i64, grid: &GridConfig) -> Result<usize> {
    Ok(analyze(bundle, k, grid)?.kernel_dim_even)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BochnerBoundRow {
    pub k: i64,
    /// Lowest eigenvalue of the Bochner Laplacian.
    pub min_eig: f64,
    pub k_lambda: f64,
    /// `−(min_eig − kλ)`.
    pub c_k: f64,
}

/// Lower bound `Δ^{V⊗L^k} ≥ kλ − C` per `k` (here `c(𝓡) = 0`).
pub fn bochner_bound(bundle: &TorusBundle, ks: RangeInclusive<i64>, grid: &GridConfig) -> Result<Vec<BochnerBoundRow>> {
    let (_, lambda) = bundle.invariants()?;
    let ks: Vec<i64> = ks.collect();
    ks.par_iter()
        .map(|&k| {
            let op = discretize_bochner(bundle, k, grid)?;
            let min_eig = eigen(&op.matrix, 1, grid.solver)?[0];
            let k_lambda = k as f64 * lambda;
            Ok(BochnerBoundRow { k, min_eig, k_lambda, c_k: k_lambda - min_eig })
        })
        .collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossResidual {
    /// `max ‖(A − B)x‖ / max(‖Ax‖, ‖Bx‖)`.
    pub relative: f64,
    /// `max ‖(A − B)x‖ / ‖x‖`.
    pub absolute: f64,
}

/// Compares two operators discretized on `lattice` on random sections.
pub fn cross_validate(
    lhs: &DiffOp<Complex64>,
    rhs: &DiffOp<Complex64>,
    lattice: &Lattice,
    trials: usize,
    seed: u64,
) -> Result<CrossResidual> {
    let a = discretize(lhs, lattice)?;
    let b = discretize(rhs, lattice)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CrossResidual { relative: 0.0, absolute: 0.0 };
    for _ in 0..trials {
        let x: Vec<Complex64> =
            (0..a.dim()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let (ax, bx) = (a.apply(&x), b.apply(&x));
        let diff: Vec<Complex64> = ax.iter().zip(&bx).map(|(p, q)| p - q).collect();
        let scale = norm(&ax).max(norm(&bx));
        let d = norm(&diff);
        out.relative = out.relative.max(if scale == 0.0 { 0.0 } else { d / scale });
        out.absolute = out.absolute.max(d / norm(&x));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossRow {
    pub label: &'static str,
    pub name: &'static str,
    pub residual: f64,
    pub absolute: f64,
    pub passed: bool,
}

/// Lattice cross-check of every asserted suite identity on a flat torus.
pub fn crosscheck_suite(bundle: &TorusBundle, k: i64, n: usize, trials: usize, seed: u64, tol: f64) -> Result<Vec<CrossRow>> {
    let sp = bundle.setup(k)?;
    let fm = bundle.forms_setup()?;
    let (ls, lf) = (Lattice::for_setup(&sp, n, 1)?, Lattice::for_setup(&fm, n, 1)?);
    type Pair = (&'static str, &'static str, bool, Box<dyn Fn() -> Result<(DiffOp<Complex64>, DiffOp<Complex64>)> + Send + Sync>);
    let sp2 = sp.clone();
    let fm2 = fm.clone();
    let pairs: Vec<Pair> = vec![
        ("a", "Lichnerowicz formula for D²", true, Box::new({
            let s = sp2.clone();
            move || {
                let d = build_dirac(&s);
                Ok((d.compose(&d)?, build_lichnerowicz_rhs(&s)?))
            }
        })),
        ("b", "square of D′ with the full curvature", true, Box::new({
            let s = sp2.clone();
            move || {
                let d = build_dirac_prime(&s);
                Ok((d.compose(&d)?, build_dirac_prime_square_rhs(&s)?))
            }
        })),
        ("c", "square of D with the full curvature", true, Box::new({
            let s = sp2.clone();
            move || {
                let d = build_dirac(&s);
                Ok((d.compose(&d)?, build_dirac_square_rhs(&s)?))
            }
        })),
        ("d", "curvature contraction equals K/4 plus twisting part", true, Box::new({
            let s = sp2.clone();
            move || {
                let p = s.p();
                let lhs = clifford_curvature_contraction(&s, |a, b| s.curvature(p + a, p + b).clone());
                let k4 = Complex64::from_surd(&s.data.scalar_curvature) * 0.25;
                let rhs = clifford_curvature_contraction(&s, |a, b| s.twisting_curvature(a, b))
                    .add(&crate::linalg::FiberEndo::scalar(s.dim(), k4));
                Ok((DiffOp::endo(&s, lhs), DiffOp::endo(&s, rhs)))
            }
        })),
        ("e", "Bochner formula for the transverse Laplacian", false, Box::new({
            let s = fm2.clone();
            move || Ok((build_delta_h(&s)?, build_bochner_rhs(&s)?))
        })),
        ("f", "squares of d_H and d_H*", false, Box::new({
            let s = fm2.clone();
            move || {
                let d = build_dh(&s)?;
                let ds = build_dh_star(&s)?;
                // Stack both identities as one operator pair on the same fiber.
                let lhs = d.compose(&d)?.add(&ds.compose(&ds)?.scale(&Complex64::new(0.0, 1.0)))?;
                let rhs = build_dh_square_rhs(&s)?.add(&build_dh_star_square_rhs(&s)?.scale(&Complex64::new(0.0, 1.0)))?;
                Ok((lhs, rhs))
            }
        })),
        ("g", "Dirac operator on forms via d_H and d_H*", false, Box::new({
            let s = fm2.clone();
            move || Ok((build_dirac(&s), build_forms_dirac_rhs(&s)?))
        })),
        ("i", "Lichnerowicz formula for basic mean curvature", true, Box::new({
            let s = sp2.clone();
            move || {
                let d = build_dirac(&s);
                Ok((d.compose(&d)?, build_lichnerowicz_rhs_basic(&s)?))
            }
        })),
    ];
    let basic = bundle.data.tau_is_basic();
    pairs
        .par_iter()
        .filter(|(label, ..)| *label != "i" || basic)
        .map(|(label, name, spinor, f)| {
            let (lhs, rhs) = f()?;
            let lattice = if *spinor { &ls } else { &lf };
            let r = cross_validate(&lhs, &rhs, lattice, trials, seed)?;
            Ok(CrossRow { label, name, residual: r.relative, absolute: r.absolute, passed: r.relative <= tol })
        })
        .collect()
}
