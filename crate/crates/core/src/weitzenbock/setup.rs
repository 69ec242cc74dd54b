//! Fiber, Clifford action, connection and curvature matrices over a model.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::clifford::{exterior_matrices, spinor_generators, ComplexStructure, TwoForm};
use crate::error::{Error, Result};
use crate::geometry::{spin_lift, ConnectionData};
use crate::linalg::{FiberEndo, SurdMatrix};
use crate::scalar::{Cx, Scalar, Surd};

pub type Word = Vec<u8>;
pub(crate) type Terms<S> = Vec<(Word, FiberEndo<S>)>;

static NEXT_ID: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberKind {
    /// Λ^{0,*} ⊗ ℂ^r ⊗ L^k.
    Spinor { l: usize, twist_dim: usize },
    /// ΛT^H M* with `c(f) = ε_{f*} − i_f`.
    Forms { q: usize },
}

/// Everything the operator calculus needs about a Clifford bundle over a
/// frame model. Connection coefficients `Γ_u` act in the trivialization
/// `∇_u s = u(s) + Γ_u s`; a central curvature `Φ` models a line bundle
/// formally.
pub struct FiberBundleSetup<S: Scalar> {
    id: u64,
    pub data: ConnectionData,
    pub kind: FiberKind,
    dim: usize,
    pub(crate) clifford: Vec<FiberEndo<S>>,
    pub(crate) exterior: Option<(Vec<FiberEndo<S>>, Vec<FiberEndo<S>>)>,
    pub(crate) grading: FiberEndo<S>,
    pub(crate) gamma: Vec<FiberEndo<S>>,
    pub(crate) phi: Vec<Vec<S>>,
    pub(crate) brackets: Vec<S>,
    pub(crate) div: Vec<S>,
    pub(crate) curvature: Vec<Vec<FiberEndo<S>>>,
    cache: Mutex<HashMap<Word, Arc<Terms<S>>>>,
}

impl<S: Scalar> std::fmt::Debug for FiberBundleSetup<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiberBundleSetup")
            .field("model", &self.data.model.name)
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .finish()
    }
}

/// `k·scale·B` extended by zero to leaf directions.
pub fn line_curvature<S: Scalar>(data: &ConnectionData, b: &TwoForm, factor: &S) -> Result<Vec<Vec<S>>> {
    let (p, n) = (data.p(), data.n());
    if b.q() != data.q() {
        return Err(Error::RankMismatch(b.q(), data.q()));
    }
    Ok((0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    if u < p || v < p {
                        S::zero()
                    } else {
                        S::from_cx(&b.entry(u - p, v - p)).times(factor)
                    }
                })
                .collect()
        })
        .collect())
}

impl<S: Scalar> FiberBundleSetup<S> {
    /// Λ^{0,*} ⊗ ℂ^{twist_dim}, spin connection from `J`, optional central
    /// curvature `phi` (n×n, e.g. from [`line_curvature`]).
    pub fn spinor(
        data: &ConnectionData,
        j: &ComplexStructure,
        twist_dim: usize,
        phi: Option<Vec<Vec<S>>>,
    ) -> Result<Arc<Self>> {
        if j.q() != data.q() {
            return Err(Error::RankMismatch(j.q(), data.q()));
        }
        if let Some(&u) = data.j_defects(j).first() {
            return Err(Error::ConnectionBreaksJ { direction: u + 1 });
        }
        let gens: Vec<FiberEndo<S>> = spinor_generators(j)?
            .iter()
            .map(|g| g.kron_identity(twist_dim).map(S::from_cx))
            .collect();
        let gamma = (0..data.n()).map(|u| spin_lift(&data.connection_matrix(u), &gens)).collect();
        let grading = j.fiber().grading(twist_dim);
        let kind = FiberKind::Spinor { l: j.q() / 2, twist_dim };
        Self::assemble(data, kind, gens, None, grading, gamma, phi)
    }

    /// ΛT^H M* with the derivation extension of the transverse connection.
    pub fn forms(data: &ConnectionData) -> Result<Arc<Self>> {
        let q = data.q();
        let (eps, iota) = exterior_matrices(q)?;
        let eps: Vec<FiberEndo<S>> = eps.iter().map(|m| m.map(S::from_cx)).collect();
        let iota: Vec<FiberEndo<S>> = iota.iter().map(|m| m.map(S::from_cx)).collect();
        let gens: Vec<FiberEndo<S>> = eps.iter().zip(&iota).map(|(e, i)| e.sub(i)).collect();
        let gamma = (0..data.n()).map(|u| derivation_lift(&data.connection_matrix(u), &eps, &iota)).collect();
        let grading = FiberEndo::from_fn(1 << q, |r, c| {
            if r != c {
                S::zero()
            } else if r.count_ones() % 2 == 1 {
                S::one().negated()
            } else {
                S::one()
            }
        });
        Self::assemble(data, FiberKind::Forms { q }, gens, Some((eps, iota)), grading, gamma, None)
    }

    fn assemble(
        data: &ConnectionData,
        kind: FiberKind,
        clifford: Vec<FiberEndo<S>>,
        exterior: Option<(Vec<FiberEndo<S>>, Vec<FiberEndo<S>>)>,
        grading: FiberEndo<S>,
        gamma: Vec<FiberEndo<S>>,
        phi: Option<Vec<Vec<S>>>,
    ) -> Result<Arc<Self>> {
        let n = data.n();
        let m = &data.model;
        let dim = grading.dim();
        let brackets: Vec<S> = (0..n * n * n).map(|x| S::from_surd(m.c(x / (n * n), (x / n) % n, x % n))).collect();
        let phi = phi.unwrap_or_else(|| vec![vec![S::zero(); n]; n]);
        if phi.len() != n || phi.iter().any(|r| r.len() != n) {
            return Err(Error::FiberMismatch(format!("central curvature must be {n}×{n}")));
        }
        check_cocycle(data, &phi)?;
        let mut curvature = vec![vec![FiberEndo::zeros(dim); n]; n];
        for u in 0..n {
            for v in 0..n {
                let mut f = gamma[u].commutator(&gamma[v]);
                for (k, gk) in gamma.iter().enumerate() {
                    let c = &brackets[(u * n + v) * n + k];
                    if !c.is_zero() {
                        f = f.sub(&gk.scale(c));
                    }
                }
                if !phi[u][v].is_zero() {
                    f.add_assign(&FiberEndo::scalar(dim, phi[u][v].clone()));
                }
                curvature[u][v] = f;
            }
        }
        for a in 0..data.p() {
            for b in 0..data.p() {
                if !is_negligible(&curvature[a][b]) {
                    return Err(Error::InvalidModel(format!(
                        "connection is not leafwise flat along ({}, {})",
                        m.label(a),
                        m.label(b)
                    )));
                }
            }
        }
        let div = data.divergence.iter().map(S::from_surd).collect();
        Ok(Arc::new(FiberBundleSetup {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            data: data.clone(),
            kind,
            dim,
            clifford,
            exterior,
            grading,
            gamma,
            phi,
            brackets,
            div,
            curvature,
            cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn p(&self) -> usize {
        self.data.p()
    }

    pub fn q(&self) -> usize {
        self.data.q()
    }

    /// `c(f_α)`, 0-based α.
    pub fn clifford(&self, alpha: usize) -> &FiberEndo<S> {
        &self.clifford[alpha]
    }

    /// `c(v) = Σ v_α c(f_α)`.
    pub fn clifford_vec(&self, v: &[S]) -> FiberEndo<S> {
        let mut out = FiberEndo::zeros(self.dim);
        for (a, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out.add_assign(&self.clifford[a].scale(x));
            }
        }
        out
    }

    /// `(ε_{f_α*}, i_{f_α})` on the forms fiber.
    pub fn exterior(&self) -> Result<&(Vec<FiberEndo<S>>, Vec<FiberEndo<S>>)> {
        self.exterior
            .as_ref()
            .ok_or_else(|| Error::FiberMismatch("operator needs the horizontal forms fiber".into()))
    }

    pub fn grading(&self) -> &FiberEndo<S> {
        &self.grading
    }

    pub fn gamma(&self, u: usize) -> &FiberEndo<S> {
        &self.gamma[u]
    }

    /// `F_{uv} = [Γ_u, Γ_v] − Σ_k c^k_{uv} Γ_k + Φ_{uv}`.
    pub fn curvature(&self, u: usize, v: usize) -> &FiberEndo<S> {
        &self.curvature[u][v]
    }

    pub fn central_curvature(&self, u: usize, v: usize) -> &S {
        &self.phi[u][v]
    }

    pub fn bracket(&self, u: usize, v: usize, k: usize) -> &S {
        let n = self.n();
        &self.brackets[(u * n + v) * n + k]
    }

    pub fn divergence(&self, u: usize) -> &S {
        &self.div[u]
    }

    /// `c(R)(f_α, f_β)`: the spin representation of the (possibly mutated)
    /// transverse curvature.
    pub fn clifford_curvature(&self, a: usize, b: usize) -> FiberEndo<S> {
        let p = self.p();
        spin_lift(&self.data.curvature[p + a][p + b], &self.clifford)
    }

    /// The transverse curvature acting on forms as a derivation.
    pub fn derivation_curvature(&self, a: usize, b: usize) -> Result<FiberEndo<S>> {
        let (eps, iota) = self.exterior()?;
        let p = self.p();
        Ok(derivation_lift(&self.data.curvature[p + a][p + b], eps, iota))
    }

    /// `R^{E/S}(f_α, f_β) = F_{αβ} − c(R)(f_α, f_β)`.
    pub fn twisting_curvature(&self, a: usize, b: usize) -> FiberEndo<S> {
        let p = self.p();
        self.curvature[p + a][p + b].sub(&self.clifford_curvature(a, b))
    }

    pub fn tau(&self) -> Vec<S> {
        self.data.tau.iter().map(S::from_surd).collect()
    }

    /// `∇_{f_α}τ` with the stored τ.
    pub fn covariant_tau(&self, alpha: usize) -> Vec<S> {
        self.data.covariant(self.p() + alpha, &self.data.tau).iter().map(S::from_surd).collect()
    }

    /// Leaf field `𝓡(f_α, f_β)` as an n-vector.
    pub fn integrability(&self, a: usize, b: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.n()];
        for (i, x) in self.data.integrability[a][b].iter().enumerate() {
            v[i] = S::from_surd(x);
        }
        v
    }

    pub(crate) fn same(&self, o: &Self) -> bool {
        self.id == o.id
    }

    /// `∇_{x_1}⋯∇_{x_m} E = Σ E_j ∇_{s_j}` with `s_j` subwords of `x`.
    pub(crate) fn push_through(&self, x: &[u8], e: &FiberEndo<S>) -> Vec<(FiberEndo<S>, Word)> {
        let Some((&first, rest)) = x.split_first() else {
            return vec![(e.clone(), Vec::new())];
        };
        let mut out = Vec::new();
        for (ej, sj) in self.push_through(rest, e) {
            let comm = self.gamma[first as usize].commutator(&ej);
            if !comm.is_zero() {
                out.push((comm, sj.clone()));
            }
            let mut w = Vec::with_capacity(sj.len() + 1);
            w.push(first);
            w.extend(sj);
            out.push((ej, w));
        }
        out
    }

    /// Normal form of the pure monomial `∇_{w_1}⋯∇_{w_m}`: coefficients to the
    /// left of nondecreasing words.
    pub(crate) fn normal_word(&self, w: &[u8]) -> Arc<Terms<S>> {
        let Some(t) = (0..w.len().saturating_sub(1)).find(|&t| w[t] > w[t + 1]) else {
            return Arc::new(vec![(w.to_vec(), FiberEndo::identity(self.dim))]);
        };
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(w) {
            return hit.clone();
        }
        let n = self.n();
        let (a, b) = (w[t] as usize, w[t + 1] as usize);
        let (x, y) = (&w[..t], &w[t + 2..]);
        let mut acc: std::collections::BTreeMap<Word, FiberEndo<S>> = Default::default();
        let add = |acc: &mut std::collections::BTreeMap<Word, FiberEndo<S>>, left: Option<&FiberEndo<S>>, s: Option<&S>, terms: &Terms<S>| {
            for (word, m) in terms {
                let mut v = match left {
                    Some(l) => l.mul(m),
                    None => m.clone(),
                };
                if let Some(s) = s {
                    v = v.scale(s);
                }
                match acc.get_mut(word) {
                    Some(cur) => cur.add_assign(&v),
                    None => {
                        acc.insert(word.clone(), v);
                    }
                }
            }
        };
        // ∇_a∇_b = ∇_b∇_a + Σ_k c^k_{ab}∇_k + F_{ab}
        let mut swapped = w.to_vec();
        swapped.swap(t, t + 1);
        add(&mut acc, None, None, &self.normal_word(&swapped));
        for k in 0..n {
            let c = self.bracket(a, b, k);
            if !c.is_zero() {
                let mut word = x.to_vec();
                word.push(k as u8);
                word.extend_from_slice(y);
                add(&mut acc, None, Some(c), &self.normal_word(&word));
            }
        }
        let f = &self.curvature[a][b];
        if !f.is_zero() {
            for (e, xs) in self.push_through(x, f) {
                let mut word = xs;
                word.extend_from_slice(y);
                add(&mut acc, Some(&e), None, &self.normal_word(&word));
            }
        }
        let terms: Arc<Terms<S>> = Arc::new(acc.into_iter().filter(|(_, m)| !m.is_zero()).collect());
        self.cache.lock().expect("cache poisoned").insert(w.to_vec(), terms.clone());
        terms
    }
}

/// Derivation extension `Σ_{β,γ} A_{γβ} ε_γ i_β` of `A ∈ End(Q)` to ΛQ.
pub fn derivation_lift<S: Scalar>(a: &SurdMatrix, eps: &[FiberEndo<S>], iota: &[FiberEndo<S>]) -> FiberEndo<S> {
    let q = eps.len();
    let mut out = FiberEndo::zeros(eps[0].dim());
    for b in 0..q {
        for g in 0..q {
            let v = a.get(g, b);
            if !v.is_zero() {
                out.add_assign(&eps[g].mul(&iota[b]).scale(&S::from_surd(v)));
            }
        }
    }
    out
}

fn is_negligible<S: Scalar>(m: &FiberEndo<S>) -> bool {
    if S::EXACT {
        m.is_zero()
    } else {
        m.max_abs() < 1e-12
    }
}

/// `Φ` must be a 2-cocycle of the frame Lie algebra (so that the
/// commutation rule is consistent) and vanish on pairs of leaf directions.
fn check_cocycle<S: Scalar>(data: &ConnectionData, phi: &[Vec<S>]) -> Result<()> {
    let n = data.n();
    let m = &data.model;
    let small = |x: &S| if S::EXACT { x.is_zero() } else { x.magnitude() < 1e-12 };
    for i in 0..n {
        if !small(&phi[i][i]) {
            return Err(Error::NotSkew(format!("central curvature has diagonal entry at {}", m.label(i))));
        }
        for j in 0..n {
            if !small(&phi[i][j].plus(&phi[j][i])) {
                return Err(Error::NotSkew("central curvature is not antisymmetric".into()));
            }
        }
    }
    for i in 0..data.p() {
        for j in 0..data.p() {
            if !small(&phi[i][j]) {
                return Err(Error::InvalidModel("line-bundle curvature is not leafwise flat".into()));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut s = S::zero();
                for r in 0..n {
                    let term = |a: usize, b: usize, c: usize| S::from_surd(m.c(a, b, r)).times(&phi[r][c]);
                    s = s.plus(&term(i, j, k)).plus(&term(j, k, i)).plus(&term(k, i, j));
                }
                if !small(&s) {
                    return Err(Error::InvalidModel(format!(
                        "line-bundle curvature is not closed on ({}, {}, {})",
                        m.label(i),
                        m.label(j),
                        m.label(k)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Exact central curvature with unit scale, for the symbolic suite.
pub fn exact_line_curvature(data: &ConnectionData, b: &TwoForm, k: i64) -> Result<Vec<Vec<Cx>>> {
    line_curvature(data, b, &Cx::real(Surd::from_int(k)))
}
