//! The spin^c fiber Λ^{0,*} = Λ(Q^{(0,1)*}) of a complex structure and the
//! Clifford action on it.

use crate::error::{Error, Result};
use crate::linalg::{dot, FiberEndo, SurdMatrix};
use crate::scalar::{Cx, Scalar, Surd};

/// Orthogonal complex structure on Q, together with an orthonormal frame
/// `(v_1, Jv_1, v_2, Jv_2, …)` adapted to it, stored as the columns of
/// `frame`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure {
    j: SurdMatrix,
    frame: SurdMatrix,
}

fn check_j(j: &SurdMatrix) -> Result<usize> {
    let q = j.n();
    if !j.is_square() {
        return Err(Error::InvalidComplexStructure("matrix is not square".into()));
    }
    if q == 0 || q % 2 == 1 {
        return Err(Error::OddCodimension(q));
    }
    if !j.mul(j).add(&SurdMatrix::identity(q)).is_zero() {
        return Err(Error::InvalidComplexStructure("J² ≠ −I".into()));
    }
    if !j.transpose().mul(j).sub(&SurdMatrix::identity(q)).is_zero() {
        return Err(Error::InvalidComplexStructure("JᵀJ ≠ I".into()));
    }
    Ok(q)
}

impl ComplexStructure {
    /// `J₀ f_{2j−1} = f_{2j}`.
    pub fn standard(q: usize) -> Result<Self> {
        if q == 0 || q % 2 == 1 {
            return Err(Error::OddCodimension(q));
        }
        let j = SurdMatrix::from_fn(q, |r, c| {
            if r % 2 == 1 && c == r - 1 {
                Surd::one()
            } else if r % 2 == 0 && c == r + 1 {
                -Surd::one()
            } else {
                Surd::zero()
            }
        });
        Ok(ComplexStructure { j, frame: SurdMatrix::identity(q) })
    }

    /// Validates `J` and searches for an adapted orthonormal frame with
    /// entries in ℚ(√2).
    pub fn new(j: SurdMatrix) -> Result<Self> {
        let q = check_j(&j)?;
        let mut cols: Vec<Vec<Surd>> = Vec::with_capacity(q);
        let unit = |k: usize| -> Vec<Surd> {
            (0..q).map(|i| if i == k { Surd::one() } else { Surd::zero() }).collect()
        };
        let mut candidates: Vec<Vec<Surd>> = (0..q).map(unit).collect();
        for a in 0..q {
            for b in a + 1..q {
                let (ea, eb) = (unit(a), unit(b));
                candidates.push(ea.iter().zip(&eb).map(|(x, y)| x + y).collect());
                candidates.push(ea.iter().zip(&eb).map(|(x, y)| x - y).collect());
            }
        }
        for cand in candidates {
            if cols.len() == q {
                break;
            }
            let mut w = cand;
            for v in &cols {
                let p = dot(&w, v);
                w = w.iter().zip(v).map(|(x, y)| x - &(&p * y)).collect();
            }
            let n2 = dot(&w, &w);
            if n2.is_zero() || !n2.is_rational() {
                continue;
            }
            let Some(n) = Surd::sqrt_of_rational(&n2.rat) else { continue };
            let inv = n.inv().expect("nonzero norm");
            let v: Vec<Surd> = w.iter().map(|x| x * &inv).collect();
            let jv = j.apply(&v);
            cols.push(v);
            cols.push(jv);
        }
        if cols.len() != q {
            return Err(Error::InvalidComplexStructure(
                "no adapted orthonormal frame over ℚ(√2) was found".into(),
            ));
        }
        let frame = SurdMatrix::from_fn(q, |r, c| cols[c][r].clone());
        Ok(ComplexStructure { j, frame })
    }

    /// Uses the given adapted orthonormal frame (columns `v_1, Jv_1, …`).
    pub fn with_frame(j: SurdMatrix, frame: SurdMatrix) -> Result<Self> {
        let q = check_j(&j)?;
        if frame.n() != q {
            return Err(Error::RankMismatch(frame.n(), q));
        }
        if !frame.transpose().mul(&frame).sub(&SurdMatrix::identity(q)).is_zero() {
            return Err(Error::InvalidComplexStructure("frame is not orthonormal".into()));
        }
        for a in 0..q / 2 {
            if j.apply(&frame.column(2 * a)) != frame.column(2 * a + 1) {
                return Err(Error::InvalidComplexStructure("frame is not J-adapted".into()));
            }
        }
        Ok(ComplexStructure { j, frame })
    }

    /// The conjugate structure −J (frame `(v_1, −Jv_1, …)`).
    pub fn conjugate(&self) -> Self {
        let q = self.q();
        let frame = SurdMatrix::from_fn(q, |r, c| {
            if c % 2 == 1 {
                -self.frame.get(r, c).clone()
            } else {
                self.frame.get(r, c).clone()
            }
        });
        ComplexStructure { j: self.j.neg(), frame }
    }

    pub fn q(&self) -> usize {
        self.j.n()
    }

    pub fn matrix(&self) -> &SurdMatrix {
        &self.j
    }

    pub fn frame(&self) -> &SurdMatrix {
        &self.frame
    }

    pub fn fiber(&self) -> SpinorFiber {
        SpinorFiber { l: self.q() / 2 }
    }
}

/// Λ(ℂ^l) with basis indexed by subsets of `{1..l}` (bitmasks).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinorFiber {
    l: usize,
}

impl SpinorFiber {
    pub fn new(l: usize) -> Self {
        SpinorFiber { l }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        1 << self.l
    }

    pub fn is_odd(&self, index: usize) -> bool {
        index.count_ones() % 2 == 1
    }

    /// Basis indices of the even (`false`) or odd (`true`) part of the fiber
    /// tensored with a twist space of dimension `r`.
    pub fn sector(&self, odd: bool, r: usize) -> Vec<usize> {
        (0..self.dim() * r).filter(|i| self.is_odd(i / r) == odd).collect()
    }

    /// Grading operator ±1, tensored with `I_r`.
    pub fn grading<S: Scalar>(&self, r: usize) -> FiberEndo<S> {
        let mut g = FiberEndo::zeros(self.dim() * r);
        for i in 0..self.dim() * r {
            let v = if self.is_odd(i / r) { S::one().negated() } else { S::one() };
            g.set(i, i, v);
        }
        g
    }

    /// Creation operator `ε_j` (1-based `j`).
    pub fn creation(&self, j: usize) -> FiberEndo<Cx> {
        let bit = j - 1;
        let mut m = FiberEndo::zeros(self.dim());
        for mask in 0..self.dim() {
            if mask & (1 << bit) == 0 {
                let neg = (mask & ((1 << bit) - 1)).count_ones() % 2 == 1;
                let v = if neg { Cx::from_int(-1) } else { Cx::one() };
                m.set(mask | (1 << bit), mask, v);
            }
        }
        m
    }

    /// Annihilation operator `ι_j = ε_j†`.
    pub fn annihilation(&self, j: usize) -> FiberEndo<Cx> {
        self.creation(j).adjoint()
    }
}

/// Matrix of `c(f)` on Λ^{0,*}. In the adapted frame, with
/// `x_j = ⟨f, v_j⟩` and `y_j = ⟨f, Jv_j⟩`,
/// `c(f) = Σ_j (x_j + i y_j) ε_j − (x_j − i y_j) ι_j`.
pub fn spinor_action(f: &[Surd], j: &ComplexStructure) -> Result<FiberEndo<Cx>> {
    let q = j.q();
    if f.len() != q {
        return Err(Error::RankMismatch(f.len(), q));
    }
    let fiber = j.fiber();
    let mut out = FiberEndo::zeros(fiber.dim());
    for a in 0..fiber.l() {
        let x = dot(f, &j.frame.column(2 * a));
        let y = dot(f, &j.frame.column(2 * a + 1));
        if x.is_zero() && y.is_zero() {
            continue;
        }
        let plus = Cx::new(x.clone(), y.clone());
        let minus = Cx::new(x, -y);
        out.add_assign(&fiber.creation(a + 1).scale(&plus));
        out.add_assign(&fiber.annihilation(a + 1).scale(&minus.negated()));
    }
    Ok(out)
}

/// `c(f_1), …, c(f_q)` for the standard basis of Q.
pub fn spinor_generators(j: &ComplexStructure) -> Result<Vec<FiberEndo<Cx>>> {
    let q = j.q();
    (0..q)
        .map(|a| {
            let e: Vec<Surd> = (0..q).map(|i| if i == a { Surd::one() } else { Surd::zero() }).collect();
            spinor_action(&e, j)
        })
        .collect()
}
