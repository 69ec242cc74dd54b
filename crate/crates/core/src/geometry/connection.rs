//! Geometric data derived from a validated frame model.

use serde::Deserialize;

use super::model::FrameModel;
use crate::clifford::{spinor_generators, ComplexStructure};
use crate::error::{Error, Result};
use crate::linalg::{FiberEndo, SurdMatrix};
use crate::scalar::{Cx, Scalar, Surd};

/// Every quantity built from the frame: connections, mean curvature,
/// integrability tensor, curvature, scalar curvature and divergences.
///
/// Fields are public so that single coefficients can be corrupted for
/// mutation tests; nothing is recomputed after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    pub model: FrameModel,
    /// `Γ^k_{ij} = ⟨∇^L_{u_i}u_j, u_k⟩` at `(i·n + j)·n + k`.
    pub levi_civita: Vec<Surd>,
    /// `ω[u][β][γ] = ⟨∇_{u}f_β, f_γ⟩` at `(u·q + β)·q + γ`.
    pub omega: Vec<Surd>,
    /// Components of τ in the horizontal frame.
    pub tau: Vec<Surd>,
    /// Leaf components of `𝓡(f_α, f_β)`, indexed `[α][β][i]`.
    pub integrability: Vec<Vec<Vec<Surd>>>,
    /// `R(u_i, u_j)` as a q×q matrix with entries `⟨R f_β, f_γ⟩` at `(γ, β)`.
    pub curvature: Vec<Vec<SurdMatrix>>,
    /// `Σ g(R(f_α,f_β)f_β, f_α)`.
    pub scalar_curvature: Surd,
    /// `div u_i`.
    pub divergence: Vec<Surd>,
}

impl ConnectionData {
    pub fn derive(model: &FrameModel) -> Result<Self> {
        model.validate().into_result()?;
        let (p, q, n) = (model.p(), model.q(), model.n());
        let half = Surd::from_ratio(1, 2);

        // Koszul formula for an invariant orthonormal frame
        let mut lc = vec![Surd::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = &(&(model.c(i, j, k) - model.c(j, k, i)) + model.c(k, i, j)) * &half;
                    lc[(i * n + j) * n + k] = v;
                }
            }
        }
        let gamma = |i: usize, j: usize, k: usize| &lc[(i * n + j) * n + k];

        let mut omega = vec![Surd::zero(); n * q * q];
        for u in 0..n {
            for b in 0..q {
                for g in 0..q {
                    let (fb, fg) = (p + b, p + g);
                    omega[(u * q + b) * q + g] = if model.is_leaf(u) {
                        model.c(u, fb, fg).clone()
                    } else {
                        gamma(u, fb, fg).clone()
                    };
                }
            }
        }

        let tau: Vec<Surd> = (0..q).map(|a| (0..p).fold(Surd::zero(), |acc, i| &acc + gamma(i, i, p + a))).collect();

        let integrability = (0..q)
            .map(|a| (0..q).map(|b| (0..p).map(|i| -model.c(p + a, p + b, i).clone()).collect()).collect())
            .collect();

        let amat = |u: usize| SurdMatrix::from_fn(q, |g, b| omega[(u * q + b) * q + g].clone());
        let a: Vec<SurdMatrix> = (0..n).map(amat).collect();
        let curvature: Vec<Vec<SurdMatrix>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut r = a[i].mul(&a[j]).sub(&a[j].mul(&a[i]));
                        for (k, ak) in a.iter().enumerate() {
                            let ck = model.c(i, j, k);
                            if !ck.is_zero() {
                                r = r.sub(&SurdMatrix::from_fn(q, |x, y| ck * ak.get(x, y)));
                            }
                        }
                        r
                    })
                    .collect()
            })
            .collect();

        let mut data = ConnectionData {
            model: model.clone(),
            levi_civita: lc,
            omega,
            tau,
            integrability,
            curvature,
            scalar_curvature: Surd::zero(),
            divergence: Vec::new(),
        };
        data.scalar_curvature = data.scalar_curvature_with(false);
        data.divergence = (0..n).map(|i| (0..n).fold(Surd::zero(), |acc, j| &acc + model.c(j, i, j))).collect();
        Ok(data)
    }

    pub fn p(&self) -> usize {
        self.model.p()
    }

    pub fn q(&self) -> usize {
        self.model.q()
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Surd {
        let n = self.n();
        &self.levi_civita[(i * n + j) * n + k]
    }

    pub fn omega(&self, u: usize, b: usize, g: usize) -> &Surd {
        let q = self.q();
        &self.omega[(u * q + b) * q + g]
    }

    /// Connection matrix `A_u` with `∇_u f_β = Σ_γ (A_u)_{γβ} f_γ`.
    pub fn connection_matrix(&self, u: usize) -> SurdMatrix {
        SurdMatrix::from_fn(self.q(), |g, b| self.omega(u, b, g).clone())
    }

    /// `∇_u v` for a horizontal field with constant components.
    pub fn covariant(&self, u: usize, v: &[Surd]) -> Vec<Surd> {
        self.connection_matrix(u).apply(v)
    }

    /// `Σ_β ∇_{f_β} f_β`.
    pub fn horizontal_trace(&self) -> Vec<Surd> {
        let q = self.q();
        (0..q)
            .map(|g| (0..q).fold(Surd::zero(), |acc, b| &acc + self.omega(self.p() + b, b, g)))
            .collect()
    }

    pub fn tau_norm_sq(&self) -> Surd {
        self.tau.iter().fold(Surd::zero(), |acc, t| &acc + &(t * t))
    }

    /// `Σ g(R(f_α,f_β)f_β, f_α)` (`transposed = false`) or
    /// `Σ g(R(f_α,f_β)f_α, f_β)` (`transposed = true`); they differ by sign.
    pub fn scalar_curvature_with(&self, transposed: bool) -> Surd {
        let (p, q) = (self.p(), self.q());
        let mut k = Surd::zero();
        for a in 0..q {
            for b in 0..q {
                let r = &self.curvature[p + a][p + b];
                let v = if transposed { r.get(b, a) } else { r.get(a, b) };
                k = &k + v;
            }
        }
        k
    }

    /// `div f_α = −g(τ + Σ_β ∇_{f_β}f_β, f_α)`.
    pub fn divergence_closed_form(&self, alpha: usize) -> Surd {
        let tr = self.horizontal_trace();
        -(&self.tau[alpha] + &tr[alpha])
    }

    /// Horizontal part of `∇_{f_α}f_β − ∇_{f_β}f_α − [f_α,f_β]` and its leaf
    /// part minus `𝓡(f_α,f_β)`; all zero on a validated model.
    pub fn torsion_identity_defect(&self) -> bool {
        let (p, q) = (self.p(), self.q());
        for a in 0..q {
            for b in 0..q {
                for g in 0..q {
                    let v = &(self.omega(p + a, b, g) - self.omega(p + b, a, g)) - self.model.c(p + a, p + b, p + g);
                    if !v.is_zero() {
                        return true;
                    }
                }
                for i in 0..p {
                    let v = &(-self.model.c(p + a, p + b, i).clone()) - &self.integrability[a][b][i];
                    if !v.is_zero() {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Directions along which `A_u J ≠ J A_u`.
    pub fn j_defects(&self, j: &ComplexStructure) -> Vec<usize> {
        (0..self.n())
            .filter(|&u| {
                let a = self.connection_matrix(u);
                a.mul(j.matrix()) != j.matrix().mul(&a)
            })
            .collect()
    }

    /// Whether `τ([u_i, u_j]) = 0` for all pairs, i.e. the invariant form τ
    /// is closed, and `τ(e_i) = 0` (automatic for a horizontal field).
    pub fn tau_is_basic(&self) -> bool {
        let (p, n) = (self.p(), self.n());
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s = (0..self.q()).fold(Surd::zero(), |acc, a| &acc + &(&self.tau[a] * self.model.c(i, j, p + a)));
                s.is_zero()
            })
        })
    }

    pub fn apply(&self, m: &Mutation) -> Result<Self> {
        let mut out = self.clone();
        let (n, q) = (self.n(), self.q());
        match m {
            Mutation::Tau { index, delta } => {
                if *index == 0 || *index > q {
                    return Err(Error::IndexOutOfRange { index: *index, rank: q });
                }
                out.tau[index - 1] = &out.tau[index - 1] + delta;
            }
            Mutation::ScalarCurvature { delta } => {
                out.scalar_curvature = &out.scalar_curvature + delta;
            }
            Mutation::Curvature { i, j, row, col, delta } => {
                for (x, r) in [(i, n), (j, n), (row, q), (col, q)] {
                    if *x == 0 || *x > r {
                        return Err(Error::IndexOutOfRange { index: *x, rank: r });
                    }
                }
                let m = &out.curvature[i - 1][j - 1];
                let mut rows: Vec<Vec<Surd>> = (0..q).map(|r| (0..q).map(|c| m.get(r, c).clone()).collect()).collect();
                rows[row - 1][col - 1] = &rows[row - 1][col - 1] + delta;
                out.curvature[i - 1][j - 1] = SurdMatrix::from_fn(q, |r, c| rows[r][c].clone());
            }
        }
        Ok(out)
    }
}

/// Corruption of a single derived coefficient, leaving every other
/// quantity untouched. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mutation {
    Tau {
        index: usize,
        #[serde(deserialize_with = "crate::geometry::file::de_surd")]
        delta: Surd,
    },
    ScalarCurvature {
        #[serde(deserialize_with = "crate::geometry::file::de_surd")]
        delta: Surd,
    },
    Curvature {
        i: usize,
        j: usize,
        row: usize,
        col: usize,
        #[serde(deserialize_with = "crate::geometry::file::de_surd")]
        delta: Surd,
    },
}

pub fn levi_civita(model: &FrameModel) -> Result<Vec<Surd>> {
    Ok(ConnectionData::derive(model)?.levi_civita)
}

pub fn transverse_connection(model: &FrameModel) -> Result<Vec<Surd>> {
    Ok(ConnectionData::derive(model)?.omega)
}

pub fn mean_curvature(model: &FrameModel) -> Result<Vec<Surd>> {
    Ok(ConnectionData::derive(model)?.tau)
}

pub fn integrability_tensor(model: &FrameModel) -> Result<Vec<Vec<Vec<Surd>>>> {
    Ok(ConnectionData::derive(model)?.integrability)
}

pub fn curvature(model: &FrameModel) -> Result<Vec<Vec<SurdMatrix>>> {
    Ok(ConnectionData::derive(model)?.curvature)
}

pub fn scalar_curvature(model: &FrameModel) -> Result<Surd> {
    Ok(ConnectionData::derive(model)?.scalar_curvature)
}

/// Riemannian divergence `div u_i = Σ_j ⟨∇^L_{u_j}u_i, u_j⟩`.
pub fn divergence(model: &FrameModel, i: usize) -> Result<Surd> {
    let d = ConnectionData::derive(model)?;
    d.divergence.get(i).cloned().ok_or(Error::IndexOutOfRange { index: i + 1, rank: d.n() })
}

/// `ρ(A) = ¼ Σ_{β,γ} A_{γβ} c(f_β)c(f_γ)`: the spin representation of a
/// skew endomorphism of Q, for any set of Clifford generators.
pub fn spin_lift<S: Scalar>(a: &SurdMatrix, gens: &[FiberEndo<S>]) -> FiberEndo<S> {
    let q = gens.len();
    let quarter = S::from_ratio(1, 4);
    let mut out = FiberEndo::zeros(gens[0].dim());
    for b in 0..q {
        for g in 0..q {
            let v = a.get(g, b);
            if b != g && !v.is_zero() {
                out.add_assign(&gens[b].mul(&gens[g]).scale(&S::from_surd(v).times(&quarter)));
            }
        }
    }
    // diagonal entries of a skew matrix vanish; kept for mutated data
    for b in 0..q {
        let v = a.get(b, b);
        if !v.is_zero() {
            out.add_assign(&FiberEndo::scalar(gens[0].dim(), S::from_surd(v).times(&quarter).negated()));
        }
    }
    out
}

/// Spin connection `Γ_u = ¼ Σ_{β,γ} ω^γ_{uβ} c(f_β)c(f_γ)` on Λ^{0,*}, one
/// matrix per frame direction. Requires `∇J = 0`.
pub fn spin_connection(data: &ConnectionData, j: &ComplexStructure) -> Result<Vec<FiberEndo<Cx>>> {
    if j.q() != data.q() {
        return Err(Error::RankMismatch(j.q(), data.q()));
    }
    if let Some(&u) = data.j_defects(j).first() {
        return Err(Error::ConnectionBreaksJ { direction: u + 1 });
    }
    let gens = spinor_generators(j)?;
    Ok((0..data.n()).map(|u| spin_lift(&data.connection_matrix(u), &gens)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> FrameModel {
        FrameModel::from_brackets("heisenberg", 1, 2, &[(1, 2, 0, Surd::one())]).unwrap()
    }

    fn sol() -> FrameModel {
        FrameModel::from_brackets("sol", 1, 2, &[(1, 0, 0, Surd::one()), (1, 2, 2, -Surd::one())]).unwrap()
    }

    fn h(x: i64, y: i64) -> Surd {
        Surd::from_ratio(x, y)
    }

    #[test]
    fn flat_torus_is_trivial() {
        let d = ConnectionData::derive(&FrameModel::torus("t3", 1, 2)).unwrap();
        assert!(d.levi_civita.iter().all(Surd::is_zero));
        assert!(d.omega.iter().all(Surd::is_zero));
        assert!(d.scalar_curvature.is_zero());
    }

    #[test]
    fn heisenberg_data() {
        let d = ConnectionData::derive(&heisenberg()).unwrap();
        assert_eq!(d.gamma(1, 2, 0), &h(1, 2));
        assert!(d.omega.iter().all(Surd::is_zero));
        assert!(d.tau.iter().all(Surd::is_zero));
        assert_eq!(d.integrability[0][1], vec![-Surd::one()]);
        assert!(d.curvature.iter().flatten().all(SurdMatrix::is_zero));
        assert!(d.divergence.iter().all(Surd::is_zero));
    }

    #[test]
    fn sol_data() {
        let d = ConnectionData::derive(&sol()).unwrap();
        // ⟨∇^L_{e1}e1, f1⟩ = 1
        assert_eq!(d.gamma(0, 0, 1), &Surd::one());
        assert_eq!(d.tau, vec![Surd::one(), Surd::zero()]);
        // ∇_{f2}f1 = f2, ∇_{f2}f2 = −f1, ∇_{f1} = 0
        assert_eq!(d.covariant(2, &[Surd::one(), Surd::zero()]), vec![Surd::zero(), Surd::one()]);
        assert_eq!(d.covariant(2, &[Surd::zero(), Surd::one()]), vec![-Surd::one(), Surd::zero()]);
        assert!(d.connection_matrix(1).is_zero());
        assert!(d.integrability.iter().flatten().flatten().all(Surd::is_zero));
        // g(R(f1,f2)f1, f2) = 1
        assert_eq!(d.curvature[1][2].get(1, 0), &Surd::one());
        assert_eq!(d.scalar_curvature_with(true), Surd::from_int(2));
        assert_eq!(d.scalar_curvature, Surd::from_int(-2));
        assert!(d.divergence.iter().all(Surd::is_zero));
        assert!(d.tau_is_basic());
    }

    #[test]
    fn closed_form_divergence_matches_trace() {
        for m in [FrameModel::torus("t", 1, 2), heisenberg(), sol()] {
            let d = ConnectionData::derive(&m).unwrap();
            for a in 0..d.q() {
                assert_eq!(d.divergence[d.p() + a], d.divergence_closed_form(a), "{}", m.name);
            }
            assert!(!d.torsion_identity_defect());
        }
    }

    #[test]
    fn sol_spin_connection() {
        let d = ConnectionData::derive(&sol()).unwrap();
        let j = ComplexStructure::standard(2).unwrap();
        let g = spin_connection(&d, &j).unwrap();
        let c = spinor_generators(&j).unwrap();
        let expect = c[0].mul(&c[1]).sub(&c[1].mul(&c[0])).scale(&Cx::real(h(1, 4)));
        assert_eq!(g[2], expect);
        assert!(g[0].is_zero() && g[1].is_zero());
        // [Γ_{f2}, c(f1)] = c(∇_{f2}f1) = c(f2)
        assert_eq!(g[2].commutator(&c[0]), c[1]);
        assert!(g[2].is_skew_hermitian());
    }

    #[test]
    fn mutation_touches_one_field() {
        let d = ConnectionData::derive(&sol()).unwrap();
        let m = d.apply(&Mutation::ScalarCurvature { delta: Surd::one() }).unwrap();
        assert_eq!(m.scalar_curvature, Surd::from_int(-1));
        assert_eq!(m.curvature, d.curvature);
        let m = d.apply(&Mutation::Curvature { i: 2, j: 3, row: 1, col: 2, delta: Surd::one() }).unwrap();
        assert_ne!(m.curvature[1][2], d.curvature[1][2]);
        assert_eq!(m.scalar_curvature, d.scalar_curvature);
        assert!(d.apply(&Mutation::Tau { index: 3, delta: Surd::one() }).is_err());
    }
}
