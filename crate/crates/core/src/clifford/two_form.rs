//! Imaginary skew two-forms on Q (line-bundle curvatures) and their Clifford
//! action on Λ^{0,*}.

use nalgebra::DMatrix;

use super::spinor::{spinor_generators, ComplexStructure};
use crate::error::{Error, Result};
use crate::linalg::{FiberEndo, SurdMatrix};
use crate::scalar::{Cx, Scalar, Surd};

/// `B = i·im` with `im` a real skew matrix, `B_{αβ} = R^L(f_α, f_β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    im: SurdMatrix,
}

impl TwoForm {
    /// From the imaginary parts `B_{αβ} = i·im[α][β]`.
    pub fn from_imag(im: SurdMatrix) -> Result<Self> {
        if !im.is_square() {
            return Err(Error::NotSkew("matrix is not square".into()));
        }
        if !im.add(&im.transpose()).is_zero() {
            return Err(Error::NotSkew("B_{αβ} ≠ −B_{βα}".into()));
        }
        Ok(TwoForm { im })
    }

    /// From complex entries, which must be purely imaginary.
    pub fn from_entries(rows: &[Vec<Cx>]) -> Result<Self> {
        let q = rows.len();
        if rows.iter().any(|r| r.len() != q) {
            return Err(Error::NotSkew("matrix is not square".into()));
        }
        if let Some((a, b)) = (0..q)
            .flat_map(|a| (0..q).map(move |b| (a, b)))
            .find(|&(a, b)| !rows[a][b].re.is_zero())
        {
            return Err(Error::NotSkew(format!("entry ({}, {}) has a real part", a + 1, b + 1)));
        }
        Self::from_imag(SurdMatrix::from_fn(q, |r, c| rows[r][c].im.clone()))
    }

    /// The form on the standard 2-planes: `B_{2j−1,2j} = −iμ_j`.
    pub fn standard(mus: &[Surd]) -> Self {
        let q = 2 * mus.len();
        TwoForm {
            im: SurdMatrix::from_fn(q, |r, c| {
                if r % 2 == 0 && c == r + 1 {
                    -mus[r / 2].clone()
                } else if r % 2 == 1 && c + 1 == r {
                    mus[c / 2].clone()
                } else {
                    Surd::zero()
                }
            }),
        }
    }

    pub fn q(&self) -> usize {
        self.im.n()
    }

    pub fn imag_part(&self) -> &SurdMatrix {
        &self.im
    }

    pub fn entry(&self, a: usize, b: usize) -> Cx {
        Cx::imag(self.im.get(a, b).clone())
    }

    /// `OᵀBO`.
    pub fn conjugate_by(&self, o: &SurdMatrix) -> Self {
        TwoForm { im: o.transpose().mul(&self.im).mul(o) }
    }

    pub fn scale(&self, s: &Surd) -> Self {
        TwoForm { im: SurdMatrix::from_fn(self.q(), |r, c| self.im.get(r, c) * s) }
    }

    /// Entries rendered as imaginary strings, e.g. `"-3/2i"`.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.q()).map(|r| (0..self.q()).map(|c| self.entry(r, c).to_string()).collect()).collect()
    }
}

fn check_rank(b: &TwoForm, j: &ComplexStructure) -> Result<()> {
    if b.q() != j.q() {
        return Err(Error::RankMismatch(b.q(), j.q()));
    }
    Ok(())
}

/// `c(B) = ½ Σ_{α,β} B_{αβ} c(f_α)c(f_β) ⊗ I_r`.
pub fn two_form_action(b: &TwoForm, j: &ComplexStructure, twist_dim: usize) -> Result<FiberEndo<Cx>> {
    check_rank(b, j)?;
    // Rotated to the adapted frame the generators are sparse with entries
    // 0, ±1, ±i, which keeps the exact products cheap.
    let frame = j.frame();
    let rotated = TwoForm { im: frame.transpose().mul(&b.im).mul(frame) };
    let c = spinor_generators(&ComplexStructure::standard(b.q())?)?;
    let mut out = FiberEndo::zeros(j.fiber().dim());
    for a in 0..b.q() {
        for bb in a + 1..b.q() {
            let e = rotated.entry(a, bb);
            if !e.is_zero() {
                out.add_assign(&c[a].mul(&c[bb]).scale(&e));
            }
        }
    }
    Ok(out.kron_identity(twist_dim))
}

/// Eigen-data of `K` defined by `iB(v, w) = g(v, Kw)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewInvariants {
    /// `μ_j > 0`, one per invariant 2-plane, descending.
    pub mus: Vec<Surd>,
    /// `Tr⁺K = Σ μ_j`.
    pub lambda: Surd,
    /// `min μ_j`.
    pub m: Surd,
}

fn surd_to_fcx(m: &SurdMatrix) -> FiberEndo<Cx> {
    FiberEndo::from_fn(m.n(), |r, c| Cx::real(m.get(r, c).clone()))
}

/// Exact `μ_j` with `±iμ_j` the eigenvalues of `K = −im`: numerical
/// estimates snapped into ℚ(√2) and then confirmed by exact ranks.
pub fn skew_invariants(b: &TwoForm) -> Result<SkewInvariants> {
    let q = b.q();
    if q == 0 || q % 2 == 1 {
        return Err(Error::OddCodimension(q));
    }
    let im = surd_to_fcx(&b.im);
    if im.rank() < q {
        return Err(Error::DegenerateCurvature);
    }
    // −K² = −im² is symmetric positive definite with eigenvalues μ_j²
    let sq = b.im.mul(&b.im).neg();
    let sq_cx = surd_to_fcx(&sq);
    let f = b.im.to_f64();
    let mf = DMatrix::from_fn(q, q, |r, c| f[r][c]);
    let mut ev: Vec<f64> = (-(&mf * &mf)).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    let mut mus = Vec::with_capacity(q / 2);
    let mut covered = 0;
    let mut idx = 0;
    while idx < ev.len() {
        let est = ev[idx].max(0.0).sqrt();
        let mut found = None;
        for cand in Surd::snap(est, 1 << 20) {
            if !cand.is_positive() || (cand.to_f64() - est).abs() > 1e-6 * est.max(1.0) {
                continue;
            }
            let shifted = sq_cx.sub(&FiberEndo::scalar(q, Cx::real(&cand * &cand)));
            let nullity = q - shifted.rank();
            if nullity > 0 {
                found = Some((cand, nullity));
                break;
            }
        }
        let Some((mu, nullity)) = found else {
            return Err(Error::InexactSpectrum(format!("μ ≈ {est}")));
        };
        for _ in 0..nullity / 2 {
            mus.push(mu.clone());
        }
        covered += nullity;
        idx += nullity;
    }
    if covered != q {
        return Err(Error::InexactSpectrum("multiplicities do not add up".into()));
    }
    let lambda = mus.iter().fold(Surd::zero(), |acc, m| &acc + m);
    let m = mus.iter().min().cloned().expect("q ≥ 2");
    Ok(SkewInvariants { mus, lambda, m })
}

/// Checks `B(J·, J·) = B` and positivity of `iB(v, Jv)`.
pub fn check_compatible(b: &TwoForm, j: &ComplexStructure) -> Result<()> {
    check_rank(b, j)?;
    let jm = j.matrix();
    if jm.transpose().mul(&b.im).mul(jm) != b.im {
        return Err(Error::Incompatible("B(J·, J·) ≠ B".into()));
    }
    // iB(v, Jv) = −vᵀ·im·J·v
    let s = surd_to_fcx(&b.im.mul(jm).neg());
    match s.is_psd() {
        Some(true) if s.rank() == b.q() => Ok(()),
        Some(_) => Err(Error::Incompatible("iB(v, Jv) is not positive".into())),
        None => Err(Error::Incompatible("iB(·, J·) is not symmetric".into())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rl1Report {
    pub lambda: Surd,
    /// Largest entry of `(c(R^L) + λ)` applied to Λ^{0,0} ⊗ twist.
    pub residual: f64,
    pub exact_zero: bool,
}

/// Residual of `c(R^L)u = −λu` on Λ^{0,0} without the compatibility check.
pub fn rl1_residual(b: &TwoForm, j: &ComplexStructure, twist_dim: usize) -> Result<Rl1Report> {
    let inv = skew_invariants(b)?;
    let crl = two_form_action(b, j, twist_dim)?;
    Ok(rl1_from_parts(&inv, &crl, twist_dim))
}

fn rl1_from_parts(inv: &SkewInvariants, crl: &FiberEndo<Cx>, twist_dim: usize) -> Rl1Report {
    let shifted = crl.add(&FiberEndo::scalar(crl.dim(), Cx::real(inv.lambda.clone())));
    let mut exact_zero = true;
    let mut residual: f64 = 0.0;
    for col in 0..twist_dim {
        for row in 0..crl.dim() {
            let v = shifted.get(row, col);
            if !v.is_zero() {
                exact_zero = false;
                residual = residual.max(v.magnitude());
            }
        }
    }
    Rl1Report { lambda: inv.lambda.clone(), residual, exact_zero }
}

pub fn check_rl1(b: &TwoForm, j: &ComplexStructure) -> Result<Rl1Report> {
    check_compatible(b, j)?;
    rl1_residual(b, j, 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OddBound {
    /// Smallest eigenvalue of `c(R^L)` on Λ^{odd} ⊗ twist.
    pub min_eig: Surd,
    /// `−(λ − 2m)`.
    pub bound: Surd,
    /// `min_eig − bound`.
    pub margin: Surd,
}

fn hermitian_eigenvalues(m: &FiberEndo<Cx>) -> Vec<f64> {
    let d = m.dim();
    let dm = DMatrix::from_fn(d, d, |r, c| m.get(r, c).to_c64());
    let mut ev: Vec<f64> = dm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Exact smallest eigenvalue of `c(R^L)` on the odd part, compared with
/// `−(λ − 2m)`. The eigenvalue is certified by checking that
/// `M − e·I` is positive semi-definite and singular.
pub fn odd_lower_bound(b: &TwoForm, j: &ComplexStructure, twist_dim: usize) -> Result<OddBound> {
    check_compatible(b, j)?;
    let inv = skew_invariants(b)?;
    let crl = two_form_action(b, j, twist_dim)?;
    odd_bound_from_parts(&inv, &crl, j, twist_dim)
}

/// Both fiber checks on one compatible pair, sharing the invariants and the
/// action matrix.
pub fn fiber_checks(b: &TwoForm, j: &ComplexStructure) -> Result<(Rl1Report, OddBound)> {
    check_compatible(b, j)?;
    let inv = skew_invariants(b)?;
    let crl = two_form_action(b, j, 1)?;
    Ok((rl1_from_parts(&inv, &crl, 1), odd_bound_from_parts(&inv, &crl, j, 1)?))
}

fn odd_bound_from_parts(inv: &SkewInvariants, crl: &FiberEndo<Cx>, j: &ComplexStructure, twist_dim: usize) -> Result<OddBound> {
    let odd = j.fiber().sector(true, twist_dim);
    let m_odd = crl.restrict(&odd);
    let est = hermitian_eigenvalues(&m_odd)[0];

    // candidates: −λ + 2Σ_{j∈S} μ_j over subsets S, then snapped estimates
    let l = inv.mus.len();
    let mut cands: Vec<Surd> = (0..1usize << l)
        .map(|s| {
            let sum = (0..l).filter(|i| s & (1 << i) != 0).fold(Surd::zero(), |acc, i| &acc + &inv.mus[i]);
            &(&sum + &sum) - &inv.lambda
        })
        .collect();
    cands.extend(Surd::snap(est, 1 << 20));
    cands.sort_by(|x, y| (x.to_f64() - est).abs().total_cmp(&(y.to_f64() - est).abs()));
    cands.dedup();
    let dim = m_odd.dim();
    let min_eig = cands
        .into_iter()
        .filter(|e| (e.to_f64() - est).abs() < 1e-6 * est.abs().max(1.0))
        .find(|e| {
            let shifted = m_odd.sub(&FiberEndo::scalar(dim, Cx::real(e.clone())));
            shifted.rank() < dim && shifted.is_psd() == Some(true)
        })
        .ok_or_else(|| Error::InexactSpectrum(format!("odd-part minimum ≈ {est}")))?;
    let bound = &(&inv.m + &inv.m) - &inv.lambda;
    let margin = &min_eig - &bound;
    Ok(OddBound { min_eig, bound, margin })
}

/// Numerical eigenvalues of a Hermitian fiber endomorphism, ascending.
pub fn fiber_eigenvalues(m: &FiberEndo<Cx>) -> Vec<f64> {
    hermitian_eigenvalues(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::spinor::spinor_generators;

    fn mu(n: i64, d: i64) -> Surd {
        Surd::from_ratio(n, d)
    }

    #[test]
    fn action_matches_direct_generator_sum() {
        use crate::clifford::generator::random_compatible_pair;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for q in [2, 4, 6] {
            for _ in 0..3 {
                let (b, j) = random_compatible_pair(q, &mut rng).unwrap();
                let c = spinor_generators(&j).unwrap();
                let mut direct = FiberEndo::zeros(j.fiber().dim());
                for x in 0..q {
                    for y in x + 1..q {
                        direct.add_assign(&c[x].mul(&c[y]).scale(&b.entry(x, y)));
                    }
                }
                assert_eq!(two_form_action(&b, &j, 1).unwrap(), direct, "q = {q}");
            }
        }
    }

    #[test]
    fn q2_action_is_single_term() {
        let m = mu(3, 2);
        let b = TwoForm::standard(&[m.clone()]);
        let j = ComplexStructure::standard(2).unwrap();
        let c = spinor_generators(&j).unwrap();
        let expect = c[0].mul(&c[1]).scale(&Cx::imag(-m.clone()));
        let act = two_form_action(&b, &j, 1).unwrap();
        assert_eq!(act, expect);
        assert!(act.is_hermitian());
        // vacuum → −μ, Λ^{0,1} → +μ
        assert_eq!(act.get(0, 0), &Cx::real(-m.clone()));
        assert_eq!(act.get(1, 1), &Cx::real(m));
        assert!(act.get(0, 1).is_zero());
    }

    #[test]
    fn invariants_of_standard_forms() {
        let inv = skew_invariants(&TwoForm::standard(&[mu(5, 3)])).unwrap();
        assert_eq!(inv.mus, vec![mu(5, 3)]);
        assert_eq!(inv.lambda, mu(5, 3));
        let inv = skew_invariants(&TwoForm::standard(&[mu(1, 2), mu(3, 1)])).unwrap();
        assert_eq!(inv.mus, vec![mu(3, 1), mu(1, 2)]);
        assert_eq!(inv.lambda, mu(7, 2));
        assert_eq!(inv.m, mu(1, 2));
        let sq = Surd::sqrt2();
        let inv = skew_invariants(&TwoForm::standard(&[sq.clone(), sq.clone()])).unwrap();
        assert_eq!(inv.mus, vec![sq.clone(), sq]);
    }

    #[test]
    fn zero_form_is_degenerate() {
        let b = TwoForm::from_imag(SurdMatrix::zeros(2)).unwrap();
        assert_eq!(skew_invariants(&b), Err(Error::DegenerateCurvature));
        assert_eq!(Error::DegenerateCurvature.to_string().contains("degenerate curvature"), true);
    }

    #[test]
    fn non_skew_rejected() {
        let m = SurdMatrix::identity(2);
        assert!(matches!(TwoForm::from_imag(m), Err(Error::NotSkew(_))));
        let rows = vec![vec![Cx::zero(), Cx::from_int(1)], vec![Cx::from_int(-1), Cx::zero()]];
        assert!(matches!(TwoForm::from_entries(&rows), Err(Error::NotSkew(_))));
    }

    #[test]
    fn rl1_and_conjugate_structure() {
        let b = TwoForm::standard(&[mu(2, 1)]);
        let j = ComplexStructure::standard(2).unwrap();
        let r = check_rl1(&b, &j).unwrap();
        assert!(r.exact_zero);
        let jbar = j.conjugate();
        assert!(matches!(check_rl1(&b, &jbar), Err(Error::Incompatible(_))));
        let r = rl1_residual(&b, &jbar, 1).unwrap();
        assert!(!r.exact_zero);
        assert!(r.residual > 0.0);
    }

    #[test]
    fn rl1_q4_distinct_mus() {
        let b = TwoForm::standard(&[mu(1, 1), mu(5, 2)]);
        let j = ComplexStructure::standard(4).unwrap();
        assert!(check_rl1(&b, &j).unwrap().exact_zero);
    }

    #[test]
    fn odd_bound_q2_is_tight() {
        let m = mu(7, 3);
        let r = odd_lower_bound(&TwoForm::standard(&[m.clone()]), &ComplexStructure::standard(2).unwrap(), 1).unwrap();
        assert_eq!(r.min_eig, m);
        assert_eq!(r.bound, m);
        assert!(r.margin.is_zero());
    }

    #[test]
    fn odd_bound_q4_equal_mus() {
        let m = mu(3, 1);
        let b = TwoForm::standard(&[m.clone(), m.clone()]);
        let r = odd_lower_bound(&b, &ComplexStructure::standard(4).unwrap(), 2).unwrap();
        // odd subsets of size one: −2μ + 2μ = 0, and bound −(2μ − 2μ) = 0
        assert!(r.min_eig.is_zero());
        assert!(r.margin.is_zero());
    }

    #[test]
    fn action_is_even() {
        let b = TwoForm::standard(&[mu(1, 1), mu(2, 1)]);
        let j = ComplexStructure::standard(4).unwrap();
        let g = j.fiber().grading::<Cx>(3);
        let a = two_form_action(&b, &j, 3).unwrap();
        assert_eq!(g.mul(&a), a.mul(&g));
    }
}
