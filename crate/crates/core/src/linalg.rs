//! Dense matrices over [`Scalar`] and over the real field ℚ(√2).

use std::cmp::Ordering;
use std::fmt;

use crate::scalar::{Cx, Scalar, Surd};

/// Square matrix acting on a finite-dimensional fiber, stored row-major.
#[derive(Clone, PartialEq)]
pub struct FiberEndo<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> fmt::Debug for FiberEndo<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiberEndo({})[", self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| format!("{:.4}", self.get(r, c).to_c64()))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> FiberEndo<S> {
    pub fn zeros(dim: usize) -> Self {
        FiberEndo { dim, data: vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, S::one())
    }

    pub fn scalar(dim: usize, s: S) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        FiberEndo { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        let d = self.dim;
        self.data.iter().enumerate().map(move |(i, v)| (i / d, i % d, v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = &self.data[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let b = &o.data[k * d + c];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * d + c;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        FiberEndo {
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        FiberEndo {
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            if !b.is_zero() {
                *a = a.plus(b);
            }
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        FiberEndo {
            dim: self.dim,
            data: self.data.iter().map(|a| a.times(s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        FiberEndo {
            dim: self.dim,
            data: self.data.iter().map(Scalar::negated).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn anticommutator(&self, o: &Self) -> Self {
        self.mul(o).add(&o.mul(self))
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, i| acc.plus(self.get(i, i)))
    }

    /// `self ⊗ I_r`, with the twist index running fastest.
    pub fn kron_identity(&self, r: usize) -> Self {
        if r == 1 {
            return self.clone();
        }
        let d = self.dim;
        let mut out = Self::zeros(d * r);
        for (i, j, v) in self.entries() {
            if v.is_zero() {
                continue;
            }
            for t in 0..r {
                out.set(i * r + t, j * r + t, v.clone());
            }
        }
        out
    }

    /// `I_d ⊗ self` for a twist-space endomorphism.
    pub fn identity_kron(d: usize, twist: &Self) -> Self {
        let r = twist.dim;
        let mut out = Self::zeros(d * r);
        for i in 0..d {
            for (a, b, v) in twist.entries() {
                if !v.is_zero() {
                    out.set(i * r + a, i * r + b, v.clone());
                }
            }
        }
        out
    }

    /// Principal submatrix on the given indices.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |r, c| self.get(idx[r], idx[c]).clone())
    }

    pub fn hermitian_defect(&self) -> Self {
        self.sub(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect().is_zero()
    }

    pub fn is_skew_hermitian(&self) -> bool {
        self.add(&self.adjoint()).is_zero()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FiberEndo<T> {
        FiberEndo { dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|r| {
                (0..self.dim).fold(S::zero(), |acc, c| {
                    let a = self.get(r, c);
                    if a.is_zero() || v[c].is_zero() {
                        acc
                    } else {
                        acc.plus(&a.times(&v[c]))
                    }
                })
            })
            .collect()
    }
}

impl FiberEndo<Cx> {
    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let d = self.dim;
        let mut m: Vec<Vec<Cx>> = (0..d).map(|r| (0..d).map(|c| self.get(r, c).clone()).collect()).collect();
        let mut rank = 0;
        for col in 0..d {
            let Some(p) = (rank..d).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][col].inv().expect("nonzero pivot");
            for r in 0..d {
                if r == rank || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].times(&inv);
                for c in col..d {
                    let t = f.times(&m[rank][c]);
                    m[r][c] = m[r][c].minus(&t);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Exact test of Hermitian positive semi-definiteness by symmetric
    /// elimination. Returns `None` if the matrix is not Hermitian.
    pub fn is_psd(&self) -> Option<bool> {
        if !self.is_hermitian() {
            return None;
        }
        let d = self.dim;
        let mut m: Vec<Vec<Cx>> = (0..d).map(|r| (0..d).map(|c| self.get(r, c).clone()).collect()).collect();
        let mut alive: Vec<bool> = vec![true; d];
        for _ in 0..d {
            // pick any remaining index with a positive diagonal
            let mut pivot = None;
            for k in (0..d).filter(|&k| alive[k]) {
                match m[k][k].re.signum() {
                    Ordering::Less => return Some(false),
                    Ordering::Greater if pivot.is_none() => pivot = Some(k),
                    _ => {}
                }
            }
            // zero diagonal entries force zero rows
            let zeros: Vec<usize> = (0..d).filter(|&k| alive[k] && m[k][k].is_zero()).collect();
            for k in zeros {
                if (0..d).any(|c| alive[c] && !m[k][c].is_zero()) {
                    return Some(false);
                }
                alive[k] = false;
            }
            let Some(k) = pivot else { break };
            alive[k] = false;
            let inv = m[k][k].inv().expect("positive pivot");
            for r in (0..d).filter(|&r| alive[r]) {
                if m[r][k].is_zero() {
                    continue;
                }
                let f = m[r][k].times(&inv);
                for c in (0..d).filter(|&c| alive[c]) {
                    let t = f.times(&m[k][c]);
                    m[r][c] = m[r][c].minus(&t);
                }
            }
        }
        Some(true)
    }
}

/// Real matrix over ℚ(√2), row-major `rows[r][c]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdMatrix {
    pub rows: Vec<Vec<Surd>>,
}

impl SurdMatrix {
    pub fn zeros(n: usize) -> Self {
        SurdMatrix { rows: vec![vec![Surd::zero(); n]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.rows[i][i] = Surd::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Surd) -> Self {
        SurdMatrix { rows: (0..n).map(|r| (0..n).map(|c| f(r, c)).collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows.iter().all(|r| r.len() == self.rows.len())
    }

    pub fn get(&self, r: usize, c: usize) -> &Surd {
        &self.rows[r][c]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n();
        Self::from_fn(n, |r, c| {
            (0..n).fold(Surd::zero(), |acc, k| {
                if self.rows[r][k].is_zero() || o.rows[k][c].is_zero() {
                    acc
                } else {
                    &acc + &(&self.rows[r][k] * &o.rows[k][c])
                }
            })
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.n(), |r, c| &self.rows[r][c] + &o.rows[r][c])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.n(), |r, c| &self.rows[r][c] - &o.rows[r][c])
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.n(), |r, c| -self.rows[r][c].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n(), |r, c| self.rows[c][r].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Surd::is_zero)
    }

    pub fn apply(&self, v: &[Surd]) -> Vec<Surd> {
        (0..self.n())
            .map(|r| (0..self.n()).fold(Surd::zero(), |acc, c| &acc + &(&self.rows[r][c] * &v[c])))
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<Surd> {
        self.rows.iter().map(|r| r[c].clone()).collect()
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n();
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, p);
            inv.swap(col, p);
            let pinv = a[col][col].inv()?;
            for c in 0..n {
                a[col][c] = &a[col][c] * &pinv;
                inv[col][c] = &inv[col][c] * &pinv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..n {
                    let t = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                    let t = &f * &inv[col][c];
                    inv[r][c] = &inv[r][c] - &t;
                }
            }
        }
        Some(SurdMatrix { rows: inv })
    }

    /// Cayley transform `(I − A)(I + A)⁻¹`, orthogonal for skew `A`.
    pub fn cayley(a: &Self) -> Option<Self> {
        let i = Self::identity(a.n());
        Some(i.sub(a).mul(&i.add(a).inverse()?))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(Surd::to_f64).collect()).collect()
    }
}

pub fn dot(a: &[Surd], b: &[Surd]) -> Surd {
    a.iter().zip(b).fold(Surd::zero(), |acc, (x, y)| &acc + &(x * y))
}
