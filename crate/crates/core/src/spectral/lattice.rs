//! Periodic lattices with U(1) link phases and the discretization of
//! normal-ordered operators.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::weitzenbock::{DiffOp, FiberBundleSetup};

/// Periodic grid on the unit torus: `leaf_points` sites along each leaf
/// direction and `n` along each transverse one. With `leaf_points = 1` the
/// lattice carries only leafwise-constant sections.
///
/// Transverse links realize the constant curvature `iθ_{αβ}` in the gauge
/// `A_β = iΣ_{α<β} θ_{αβ} x_α`, with transition phases on the wrapping
/// links of lower directions.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    p: usize,
    q: usize,
    n: usize,
    leaf_points: usize,
    theta: Vec<Vec<f64>>,
    gauge: Option<Vec<f64>>,
}

impl Lattice {
    /// `theta[α][β]` is the flux through the transverse (α, β) torus; it
    /// must be antisymmetric and a multiple of 2π.
    pub fn new(p: usize, q: usize, n: usize, leaf_points: usize, theta: Vec<Vec<f64>>) -> Result<Self> {
        if n < 2 || leaf_points == 0 {
            return Err(Error::InvalidModel(format!("grid too small: n = {n}, leaf points = {leaf_points}")));
        }
        if theta.len() != q || theta.iter().any(|r| r.len() != q) {
            return Err(Error::FiberMismatch(format!("flux matrix must be {q}×{q}")));
        }
        for a in 0..q {
            for b in 0..q {
                if (theta[a][b] + theta[b][a]).abs() > 1e-12 {
                    return Err(Error::NotSkew(format!("flux ({}, {})", a + 1, b + 1)));
                }
                let c = theta[a][b] / TAU;
                if a < b && (c - c.round()).abs() > 1e-9 {
                    return Err(Error::NonIntegerChern(-c, a + 1, b + 1));
                }
            }
        }
        Ok(Lattice { p, q, n, leaf_points, theta, gauge: None })
    }

    /// Flux read off the central curvature of a flat-torus bundle setup.
    pub fn for_setup(setup: &FiberBundleSetup<Complex64>, n: usize, leaf_points: usize) -> Result<Self> {
        if !setup.data.model.is_abelian() {
            return Err(Error::NotTorus(setup.data.model.name.clone()));
        }
        let (p, q) = (setup.p(), setup.q());
        let theta = (0..q).map(|a| (0..q).map(|b| setup.central_curvature(p + a, p + b).im).collect()).collect();
        Self::new(p, q, n, leaf_points, theta)
    }

    /// Applies the gauge transformation `U_u(x) ↦ e^{iφ(x)} U_u(x) e^{−iφ(x+u)}`.
    pub fn with_gauge(mut self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.sites() {
            return Err(Error::FiberMismatch(format!("{} gauge phases for {} sites", phases.len(), self.sites())));
        }
        self.gauge = Some(phases);
        Ok(self)
    }

    pub fn with_random_gauge(self, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phases = (0..self.sites()).map(|_| rng.gen_range(0.0..TAU)).collect();
        self.with_gauge(phases)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leaf_points(&self) -> usize {
        self.leaf_points
    }

    fn extent(&self, u: usize) -> usize {
        if u < self.p {
            self.leaf_points
        } else {
            self.n
        }
    }

    pub fn sites(&self) -> usize {
        self.leaf_points.pow(self.p as u32) * self.n.pow(self.q as u32)
    }

    /// Grid coordinates, leaf directions first.
    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        let mut out = vec![0; self.p + self.q];
        for u in (0..self.p + self.q).rev() {
            out[u] = site % self.extent(u);
            site /= self.extent(u);
        }
        out
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        coords.iter().enumerate().fold(0, |acc, (u, &i)| acc * self.extent(u) + i)
    }

    fn spacing(&self, u: usize) -> f64 {
        1.0 / self.extent(u) as f64
    }

    /// Neighbor of `site` in direction `u` and the parallel transport
    /// `U_u(site)` from it.
    pub fn link(&self, u: usize, site: usize) -> (usize, Complex64) {
        let mut x = self.coords(site);
        let mut phase = 0.0;
        if u >= self.p {
            let a = u - self.p;
            let h = self.spacing(u);
            for g in 0..a {
                phase += h * self.theta[g][a] * x[self.p + g] as f64 * h;
            }
            if x[u] == self.n - 1 {
                for b in a + 1..self.q {
                    phase -= self.theta[a][b] * x[self.p + b] as f64 * h;
                }
            }
        }
        x[u] = (x[u] + 1) % self.extent(u);
        let next = self.site(&x);
        if let Some(g) = &self.gauge {
            phase += g[site] - g[next];
        }
        (next, Complex64::from_polar(1.0, phase))
    }

    /// Holonomy around the elementary (α, β) plaquette at `site`.
    pub fn plaquette(&self, a: usize, b: usize, site: usize) -> Complex64 {
        let (ua, ub) = (self.p + a, self.p + b);
        let (s1, u1) = self.link(ua, site);
        let (_, u2) = self.link(ub, s1);
        let (s3, u3) = self.link(ub, site);
        let (_, u4) = self.link(ua, s3);
        u1 * u2 * (u4 * u3).conj()
    }

    /// `(Tψ)(x) = U_u(x) ψ(x + u)`.
    pub fn shift(&self, u: usize) -> SparseMatrix {
        SparseMatrix::from_triplets(self.sites(), (0..self.sites()).map(|s| {
            let (t, v) = self.link(u, s);
            (s, t, v)
        }))
    }

    /// Central covariant difference `(T − T†)/2h`.
    pub fn first_difference(&self, u: usize) -> SparseMatrix {
        let t = self.shift(u);
        let h = self.spacing(u);
        t.add(&t.adjoint().scale(Complex64::new(-1.0, 0.0))).scale(Complex64::new(0.5 / h, 0.0))
    }

    /// Covariant second difference `(T + T† − 2)/h²`.
    pub fn second_difference(&self, u: usize) -> SparseMatrix {
        let t = self.shift(u);
        let h = self.spacing(u);
        let two = SparseMatrix::identity(self.sites()).scale(Complex64::new(-2.0, 0.0));
        t.add(&t.adjoint()).add(&two).scale(Complex64::new(1.0 / (h * h), 0.0))
    }

    /// Site operator for a derivative word: `∇_u∇_u` becomes the second
    /// difference, anything else a product of central differences.
    pub fn word(&self, w: &[u8]) -> SparseMatrix {
        match w {
            [] => SparseMatrix::identity(self.sites()),
            [a, b] if a == b => self.second_difference(*a as usize),
            _ => w
                .iter()
                .map(|&u| self.first_difference(u as usize))
                .reduce(|acc, d| acc.mul(&d))
                .expect("nonempty word"),
        }
    }
}

/// Lattice matrix of a normal-ordered operator: `Σ_w S_w ⊗ E_w`.
pub fn discretize(op: &DiffOp<Complex64>, lattice: &Lattice) -> Result<SparseMatrix> {
    let setup = op.setup();
    if setup.p() != lattice.p || setup.q() != lattice.q {
        return Err(Error::RankMismatch(setup.n(), lattice.p + lattice.q));
    }
    let dim = lattice.sites() * setup.dim();
    let mut out = SparseMatrix::zeros(dim);
    for (w, e) in op.terms() {
        out = out.add(&lattice.word(w).kron_endo(e));
    }
    Ok(out)
}
