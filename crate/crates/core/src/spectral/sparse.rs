//! Row-compressed complex sparse matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::FiberEndo;

/// Square sparse matrix with sorted, duplicate-free rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

fn compress(mut row: Vec<(usize, Complex64)>) -> Vec<(usize, Complex64)> {
    row.sort_by_key(|&(c, _)| c);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| v.re != 0.0 || v.im != 0.0);
    out
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix { dim, rows: (0..dim).map(|i| vec![(i, Complex64::new(1.0, 0.0))]).collect() }
    }

    /// Sums duplicate entries.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows = vec![Vec::new(); dim];
        for (r, c, v) in entries {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside {dim}×{dim}");
            rows[r].push((c, v));
        }
        SparseMatrix { dim, rows: rows.into_iter().map(compress).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match self.rows[r].binary_search_by_key(&c, |&(c, _)| c) {
            Ok(i) => self.rows[r][i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let rows = self
            .rows
            .iter()
            .map(|row| compress(row.iter().flat_map(|&(k, a)| o.rows[k].iter().map(move |&(c, b)| (c, a * b))).collect()))
            .collect();
        SparseMatrix { dim: self.dim, rows }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let rows = self.rows.iter().zip(&o.rows).map(|(a, b)| compress(a.iter().chain(b).copied().collect())).collect();
        SparseMatrix { dim: self.dim, rows }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let rows = self.rows.iter().map(|row| compress(row.iter().map(|&(c, v)| (c, v * s)).collect())).collect();
        SparseMatrix { dim: self.dim, rows }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    /// `S ⊗ E` with the fiber index fastest: row `site·d + a`.
    pub fn kron_endo(&self, e: &FiberEndo<Complex64>) -> Self {
        let d = e.dim();
        let fiber: Vec<(usize, usize, Complex64)> = e.entries().filter(|(_, _, v)| v.re != 0.0 || v.im != 0.0).map(|(r, c, v)| (r, c, *v)).collect();
        Self::from_triplets(
            self.dim * d,
            self.triplets().flat_map(|(r, c, s)| fiber.iter().map(move |&(a, b, v)| (r * d + a, c * d + b, s * v))),
        )
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        self.rows.iter().map(|row| row.iter().map(|&(c, v)| v * x[c]).sum()).collect()
    }

    pub fn apply_block(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        assert_eq!(x.nrows(), self.dim);
        let mut out = DMatrix::zeros(self.dim, x.ncols());
        for (r, row) in self.rows.iter().enumerate() {
            for j in 0..x.ncols() {
                out[(r, j)] = row.iter().map(|&(c, v)| v * x[(c, j)]).sum();
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Principal submatrix on `idx`.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (i, &j) in idx.iter().enumerate() {
            pos[j] = i;
        }
        let rows = idx
            .iter()
            .map(|&r| self.rows[r].iter().filter(|(c, _)| pos[*c] != usize::MAX).map(|&(c, v)| (pos[c], v)).collect::<Vec<_>>())
            .map(compress)
            .collect();
        SparseMatrix { dim: idx.len(), rows }
    }

    /// Largest entry of `A − A†`; exactly zero for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        self.triplets().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    /// `½(A + A†)`, stored so that mirrored entries are exact conjugates.
    pub fn hermitian_part(&self) -> Self {
        let mut out = Vec::new();
        for (r, c, _) in self.triplets().chain(self.adjoint().triplets()) {
            if r < c {
                let v = (self.get(r, c) + self.get(c, r).conj()) * 0.5;
                out.push((r, c, v));
                out.push((c, r, v.conj()));
            } else if r == c {
                out.push((r, r, Complex64::new(self.get(r, r).re, 0.0)));
            }
        }
        out.sort_by_key(|&(r, c, _)| (r, c));
        out.dedup_by_key(|&mut (r, c, _)| (r, c));
        Self::from_triplets(self.dim, out)
    }

    /// Largest absolute row sum, an upper bound for the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.rows.iter().map(|row| row.iter().map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0)), (1, 0, c(0.0, 2.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), c(0.0, 2.0));
    }

    #[test]
    fn hermitian_part_is_exact() {
        let m = SparseMatrix::from_triplets(3, [(0, 1, c(1.0, 0.3)), (1, 0, c(0.9, -0.3)), (2, 2, c(1.0, 0.1)), (0, 2, c(0.0, 1.0))]);
        assert!(m.hermitian_defect() > 0.0);
        let h = m.hermitian_part();
        assert_eq!(h.hermitian_defect(), 0.0);
        assert_eq!(h.get(0, 1), c(0.95, 0.3));
        assert_eq!(h.get(2, 0), c(0.0, -0.5));
    }

    #[test]
    fn kron_and_restrict() {
        let s = SparseMatrix::identity(2);
        let e = FiberEndo::from_fn(2, |r, cc| if r != cc { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let k = s.kron_endo(&e);
        assert_eq!(k.dim(), 4);
        assert_eq!(k.get(2, 3), c(1.0, 0.0));
        assert_eq!(k.get(1, 2), c(0.0, 0.0));
        let r = k.restrict(&[0, 1]);
        for (i, j, v) in e.entries() {
            assert_eq!(r.get(i, j), *v);
        }
    }
}
