//! Dirac operators, Laplacians and the right-hand sides of the Weitzenböck
//! identities as normal-ordered operators.

use std::sync::Arc;

use super::diffop::DiffOp;
use super::setup::FiberBundleSetup;
use crate::error::Result;
use crate::linalg::FiberEndo;
use crate::scalar::Scalar;

type Setup<S> = Arc<FiberBundleSetup<S>>;

fn horizontal<S: Scalar>(s: &Setup<S>, alpha: usize) -> DiffOp<S> {
    DiffOp::nabla(s, s.p() + alpha)
}

/// `D′ = Σ_α c(f_α)∇_{f_α}`.
pub fn build_dirac_prime<S: Scalar>(s: &Setup<S>) -> DiffOp<S> {
    let mut out = DiffOp::zero(s);
    for a in 0..s.q() {
        out = out.add(&horizontal(s, a).left_mul(s.clifford(a))).expect("same setup");
    }
    out
}

/// `D = D′ − ½c(τ)`.
pub fn build_dirac<S: Scalar>(s: &Setup<S>) -> DiffOp<S> {
    let ctau = s.clifford_vec(&s.tau()).scale(&S::from_ratio(-1, 2));
    build_dirac_prime(s).add(&DiffOp::endo(s, ctau)).expect("same setup")
}

/// `Σ_α (∇_{f_α})*∇_{f_α}`.
pub fn build_bochner<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let mut out = DiffOp::zero(s);
    for a in 0..s.q() {
        let na = horizontal(s, a);
        out = out.add(&na.adjoint()?.compose(&na)?)?;
    }
    Ok(out)
}

/// `−Σ_α ∇²_{f_α} + ∇_τ + ∇_{Σ_β ∇_{f_β}f_β}`, the expanded Bochner
/// Laplacian.
pub fn build_bochner_expanded<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let mut out = DiffOp::zero(s);
    for a in 0..s.q() {
        let na = horizontal(s, a);
        out = out.sub(&na.compose(&na)?)?;
    }
    let tr: Vec<S> = s.data.horizontal_trace().iter().map(S::from_surd).collect();
    let tau = s.tau();
    let mut x = vec![S::zero(); s.n()];
    for a in 0..s.q() {
        x[s.p() + a] = tau[a].plus(&tr[a]);
    }
    out.add(&DiffOp::nabla_along(s, &x))
}

fn horizontal_field<S: Scalar>(s: &Setup<S>, v: &[S]) -> DiffOp<S> {
    let mut x = vec![S::zero(); s.n()];
    for (a, c) in v.iter().enumerate() {
        x[s.p() + a] = c.clone();
    }
    DiffOp::nabla_along(s, &x)
}

/// `½ Σ_{α,β} c(f_α)c(f_β)[T(α, β) − ∇_{𝓡(f_α,f_β)}]`.
fn clifford_contraction<S: Scalar>(s: &Setup<S>, t: impl Fn(usize, usize) -> FiberEndo<S>) -> Result<DiffOp<S>> {
    let half = S::from_ratio(1, 2);
    let mut out = DiffOp::zero(s);
    for a in 0..s.q() {
        for b in 0..s.q() {
            let cc = s.clifford(a).mul(s.clifford(b)).scale(&half);
            let inner = DiffOp::endo(s, t(a, b)).sub(&DiffOp::nabla_along(s, &s.integrability(a, b)))?;
            out = out.add(&inner.left_mul(&cc))?;
        }
    }
    Ok(out)
}

/// `−½ Σ_α c(f_α)c(∇_{f_α}τ) − ¼‖τ‖²`.
fn tau_terms<S: Scalar>(s: &Setup<S>) -> FiberEndo<S> {
    let mut e = FiberEndo::zeros(s.dim());
    for a in 0..s.q() {
        e.add_assign(&s.clifford(a).mul(&s.clifford_vec(&s.covariant_tau(a))).scale(&S::from_ratio(-1, 2)));
    }
    let norm = S::from_surd(&s.data.tau_norm_sq()).times(&S::from_ratio(-1, 4));
    e.add(&FiberEndo::scalar(s.dim(), norm))
}

/// `Σ∇*∇ − ½Σ c(f_α)c(∇_{f_α}τ) − ¼‖τ‖² + K/4 + ½Σ c(f_α)c(f_β)[R^{E/S} − ∇_𝓡]`.
pub fn build_lichnerowicz_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let k4 = S::from_surd(&s.data.scalar_curvature).times(&S::from_ratio(1, 4));
    build_bochner(s)?
        .add(&DiffOp::endo(s, tau_terms(s)))?
        .add(&DiffOp::scalar(s, k4))?
        .add(&clifford_contraction(s, |a, b| s.twisting_curvature(a, b))?)
}

/// Same right-hand side for basic τ:
/// `Σ∇*∇ − ½d_H^*τ + ¼‖τ‖² + K/4 + ½Σ c c[R^{E/S} − ∇_𝓡]`, with
/// `d_H^*τ = −Σ_α g(∇_{f_α}τ, f_α) + ‖τ‖²`.
pub fn build_lichnerowicz_rhs_basic<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let mut codiff = S::from_surd(&s.data.tau_norm_sq());
    for a in 0..s.q() {
        codiff = codiff.minus(&s.covariant_tau(a)[a]);
    }
    let norm = S::from_surd(&s.data.tau_norm_sq());
    let k = S::from_surd(&s.data.scalar_curvature);
    let scalar = codiff
        .times(&S::from_ratio(-1, 2))
        .plus(&norm.times(&S::from_ratio(1, 4)))
        .plus(&k.times(&S::from_ratio(1, 4)));
    build_bochner(s)?
        .add(&DiffOp::scalar(s, scalar))?
        .add(&clifford_contraction(s, |a, b| s.twisting_curvature(a, b))?)
}

/// `Σ∇*∇ − ∇_τ + ½Σ c(f_α)c(f_β)[R^E − ∇_𝓡]`, the square of `D′`.
pub fn build_dirac_prime_square_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    build_bochner(s)?
        .sub(&horizontal_field(s, &s.tau()))?
        .add(&clifford_contraction(s, |a, b| s.curvature(s.p() + a, s.p() + b).clone())?)
}

/// `Σ∇*∇ − ½Σ c(f_α)c(∇_{f_α}τ) − ¼‖τ‖² + ½Σ c(f_α)c(f_β)[R^E − ∇_𝓡]`.
pub fn build_dirac_square_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    build_bochner(s)?
        .add(&DiffOp::endo(s, tau_terms(s)))?
        .add(&clifford_contraction(s, |a, b| s.curvature(s.p() + a, s.p() + b).clone())?)
}

/// `d_H = Σ_α ε_{f_α*}∇_{f_α}` on horizontal forms.
pub fn build_dh<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let (eps, _) = s.exterior()?;
    let mut out = DiffOp::zero(s);
    for (a, e) in eps.iter().enumerate() {
        out = out.add(&horizontal(s, a).left_mul(e))?;
    }
    Ok(out)
}

fn interior<S: Scalar>(s: &Setup<S>, v: &[S]) -> Result<FiberEndo<S>> {
    let (_, iota) = s.exterior()?;
    let mut out = FiberEndo::zeros(s.dim());
    for (a, x) in v.iter().enumerate() {
        if !x.is_zero() {
            out.add_assign(&iota[a].scale(x));
        }
    }
    Ok(out)
}

fn exterior<S: Scalar>(s: &Setup<S>, v: &[S]) -> Result<FiberEndo<S>> {
    let (eps, _) = s.exterior()?;
    let mut out = FiberEndo::zeros(s.dim());
    for (a, x) in v.iter().enumerate() {
        if !x.is_zero() {
            out.add_assign(&eps[a].scale(x));
        }
    }
    Ok(out)
}

/// `d_H^* = −Σ_α i_{f_α}∇_{f_α} + i_τ`.
pub fn build_dh_star<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let (_, iota) = s.exterior()?;
    let mut out = DiffOp::endo(s, interior(s, &s.tau())?);
    for (a, i) in iota.iter().enumerate() {
        out = out.sub(&horizontal(s, a).left_mul(i))?;
    }
    Ok(out)
}

/// `Δ_H = d_H d_H^* + d_H^* d_H`.
pub fn build_delta_h<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let d = build_dh(s)?;
    let ds = build_dh_star(s)?;
    d.compose(&ds)?.add(&ds.compose(&d)?)
}

/// `D_H = d_H + d_H^*`.
pub fn build_signature<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    build_dh(s)?.add(&build_dh_star(s)?)
}

/// `Σ∇*∇ + Σ_α ε_{f_α*} i_{∇_{f_α}τ} − Σ_{α,β} ε_{f_α*} i_{f_β}(R(f_α,f_β) − ∇_𝓡)`.
pub fn build_bochner_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let (eps, iota) = s.exterior()?;
    let mut out = build_bochner(s)?;
    for (a, e) in eps.iter().enumerate() {
        out = out.add(&DiffOp::endo(s, e.mul(&interior(s, &s.covariant_tau(a))?)))?;
    }
    for a in 0..s.q() {
        for b in 0..s.q() {
            let inner = DiffOp::endo(s, s.derivation_curvature(a, b)?).sub(&DiffOp::nabla_along(s, &s.integrability(a, b)))?;
            out = out.sub(&inner.left_mul(&eps[a].mul(&iota[b])))?;
        }
    }
    Ok(out)
}

/// `−½ Σ_{α,β} ε_{f_α*}ε_{f_β*}∇_{𝓡(f_α,f_β)}`.
pub fn build_dh_square_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let (eps, _) = s.exterior()?;
    let mut out = DiffOp::zero(s);
    for a in 0..s.q() {
        for b in 0..s.q() {
            let e = eps[a].mul(&eps[b]).scale(&S::from_ratio(-1, 2));
            out = out.add(&DiffOp::nabla_along(s, &s.integrability(a, b)).left_mul(&e))?;
        }
    }
    Ok(out)
}

/// `−½ Σ_{α,β} i_{f_α}i_{f_β}∇_{𝓡(f_α,f_β)} − Σ_α i_{f_α}i_{∇_{f_α}τ}`.
pub fn build_dh_star_square_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let (_, iota) = s.exterior()?;
    let mut out = DiffOp::zero(s);
    for a in 0..s.q() {
        for b in 0..s.q() {
            let e = iota[a].mul(&iota[b]).scale(&S::from_ratio(-1, 2));
            out = out.add(&DiffOp::nabla_along(s, &s.integrability(a, b)).left_mul(&e))?;
        }
        out = out.sub(&DiffOp::endo(s, iota[a].mul(&interior(s, &s.covariant_tau(a))?)))?;
    }
    Ok(out)
}

/// `d_H + d_H^* − ½(ε_{τ*} + i_τ)`.
pub fn build_forms_dirac_rhs<S: Scalar>(s: &Setup<S>) -> Result<DiffOp<S>> {
    let tau = s.tau();
    let e = exterior(s, &tau)?.add(&interior(s, &tau)?).scale(&S::from_ratio(-1, 2));
    build_signature(s)?.add(&DiffOp::endo(s, e))
}

/// `½ Σ_{α,β} X_α X_β R(f_α, f_β)` for `X = ε` (`exterior = true`) or
/// `X = i`, with R acting on forms as a derivation.
pub fn forms_curvature_contraction<S: Scalar>(s: &Setup<S>, exterior: bool) -> Result<FiberEndo<S>> {
    let (eps, iota) = s.exterior()?;
    let ops = if exterior { eps } else { iota };
    let mut out = FiberEndo::zeros(s.dim());
    for a in 0..s.q() {
        for b in 0..s.q() {
            out.add_assign(&ops[a].mul(&ops[b]).mul(&s.derivation_curvature(a, b)?).scale(&S::from_ratio(1, 2)));
        }
    }
    Ok(out)
}

/// `½ Σ_{α,β} c(f_α)c(f_β)T(α, β)` for a curvature-type family `T`.
pub fn clifford_curvature_contraction<S: Scalar>(s: &Setup<S>, t: impl Fn(usize, usize) -> FiberEndo<S>) -> FiberEndo<S> {
    let mut out = FiberEndo::zeros(s.dim());
    for a in 0..s.q() {
        for b in 0..s.q() {
            out.add_assign(&s.clifford(a).mul(s.clifford(b)).mul(&t(a, b)).scale(&S::from_ratio(1, 2)));
        }
    }
    out
}
