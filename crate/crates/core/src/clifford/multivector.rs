//! Exterior algebra ΛQ over an orthonormal basis, the Clifford action
//! `c(f) = ε_{f*} − i_f` on it, and the Clifford algebra stored through its
//! symbol.

use crate::error::{Error, Result};
use crate::linalg::FiberEndo;
use crate::scalar::{Cx, Scalar};

/// Sign `(−1)^{#{s ∈ mask : s < bit}}`.
fn reorder_sign(mask: usize, bit: usize) -> bool {
    (mask & ((1usize << bit) - 1)).count_ones() % 2 == 1
}

/// Element of ΛQ ⊗ ℂ, indexed by subsets of `{1..q}` encoded as bitmasks
/// (bit `a−1` stands for `f_a`).
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    rank: usize,
    coeffs: Vec<Cx>,
}

impl Multivector {
    pub fn zero(rank: usize) -> Result<Self> {
        if rank % 2 == 1 || rank == 0 {
            return Err(Error::OddCodimension(rank));
        }
        Ok(Multivector { rank, coeffs: vec![Cx::zero(); 1 << rank] })
    }

    pub fn scalar(rank: usize, s: Cx) -> Result<Self> {
        let mut m = Self::zero(rank)?;
        m.coeffs[0] = s;
        Ok(m)
    }

    /// `f_{i1} ∧ … ∧ f_{ik}` with 1-based, not necessarily sorted indices.
    pub fn blade(rank: usize, indices: &[usize]) -> Result<Self> {
        let mut m = Self::scalar(rank, Cx::one())?;
        for &i in indices.iter().rev() {
            m = m.exterior(i)?;
        }
        Ok(m)
    }

    pub fn from_coeffs(rank: usize, coeffs: Vec<Cx>) -> Result<Self> {
        let m = Self::zero(rank)?;
        if coeffs.len() != m.coeffs.len() {
            return Err(Error::RankMismatch(coeffs.len(), m.coeffs.len()));
        }
        Ok(Multivector { rank, coeffs })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeff(&self, mask: usize) -> &Cx {
        &self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn check_index(&self, index: usize) -> Result<usize> {
        if index == 0 || index > self.rank {
            return Err(Error::IndexOutOfRange { index, rank: self.rank });
        }
        Ok(index - 1)
    }

    fn check_rank(&self, o: &Self) -> Result<()> {
        if self.rank != o.rank {
            return Err(Error::RankMismatch(self.rank, o.rank));
        }
        Ok(())
    }

    /// `ε_{f_index*}`.
    pub fn exterior(&self, index: usize) -> Result<Self> {
        let bit = self.check_index(index)?;
        let mut out = Self::zero(self.rank)?;
        for (mask, v) in self.coeffs.iter().enumerate() {
            if v.is_zero() || mask & (1 << bit) != 0 {
                continue;
            }
            let t = if reorder_sign(mask, bit) { v.negated() } else { v.clone() };
            out.coeffs[mask | (1 << bit)] = t;
        }
        Ok(out)
    }

    /// `i_{f_index}`.
    pub fn interior(&self, index: usize) -> Result<Self> {
        let bit = self.check_index(index)?;
        let mut out = Self::zero(self.rank)?;
        for (mask, v) in self.coeffs.iter().enumerate() {
            if v.is_zero() || mask & (1 << bit) == 0 {
                continue;
            }
            let t = if reorder_sign(mask, bit) { v.negated() } else { v.clone() };
            out.coeffs[mask & !(1 << bit)] = t;
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_rank(o)?;
        Ok(Multivector {
            rank: self.rank,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_rank(o)?;
        Ok(Multivector {
            rank: self.rank,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.minus(b)).collect(),
        })
    }

    pub fn scale(&self, s: &Cx) -> Self {
        Multivector { rank: self.rank, coeffs: self.coeffs.iter().map(|a| a.times(s)).collect() }
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        self.check_rank(o)?;
        let mut out = Self::zero(self.rank)?;
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in o.coeffs.iter().enumerate() {
                if y.is_zero() || a & b != 0 {
                    continue;
                }
                // sign of moving the blades of `b` past those of `a`
                let mut neg = false;
                for bit in 0..self.rank {
                    if b & (1 << bit) != 0 && (a >> (bit + 1)).count_ones() % 2 == 1 {
                        neg = !neg;
                    }
                }
                let t = x.times(y);
                let t = if neg { t.negated() } else { t };
                out.coeffs[a | b] = out.coeffs[a | b].plus(&t);
            }
        }
        Ok(out)
    }

    /// Degree-`k` component.
    pub fn grade(&self, k: usize) -> Self {
        Multivector {
            rank: self.rank,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, v)| if m.count_ones() as usize == k { v.clone() } else { Cx::zero() })
                .collect(),
        }
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, _)| m.count_ones() as usize)
            .max()
    }
}

/// Clifford action `c(f_index) = ε_{f*} − i_f` on ΛQ.
pub fn lambda_action(index: usize, omega: &Multivector) -> Result<Multivector> {
    omega.exterior(index)?.sub(&omega.interior(index)?)
}

/// Matrices of `ε_{f_a*}` and `i_{f_a}` on ΛQ in the blade basis.
pub fn exterior_matrices(rank: usize) -> Result<(Vec<FiberEndo<Cx>>, Vec<FiberEndo<Cx>>)> {
    let dim = 1usize << rank;
    let mut eps = Vec::with_capacity(rank);
    let mut iota = Vec::with_capacity(rank);
    for a in 1..=rank {
        let mut e = FiberEndo::zeros(dim);
        let mut i = FiberEndo::zeros(dim);
        for mask in 0..dim {
            let basis = Multivector::from_coeffs(
                rank,
                (0..dim).map(|m| if m == mask { Cx::one() } else { Cx::zero() }).collect(),
            )?;
            for (row, v) in basis.exterior(a)?.coeffs.iter().enumerate() {
                if !v.is_zero() {
                    e.set(row, mask, v.clone());
                }
            }
            for (row, v) in basis.interior(a)?.coeffs.iter().enumerate() {
                if !v.is_zero() {
                    i.set(row, mask, v.clone());
                }
            }
        }
        eps.push(e);
        iota.push(i);
    }
    Ok((eps, iota))
}

/// Element of Cl(Q) ⊗ ℂ held by its symbol σ(a) = c(a)·1.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    symbol: Multivector,
}

/// Quantization map 𝐜: ΛQ → Cl(Q), `f_{i1}∧…∧f_{ik} ↦ c(f_{i1})…c(f_{ik})`.
pub fn quantize(omega: &Multivector) -> CliffordElement {
    CliffordElement { symbol: omega.clone() }
}

/// Symbol map σ(a) = c(a)·1.
pub fn symbol(a: &CliffordElement) -> Multivector {
    a.symbol.clone()
}

/// Left action of a Clifford element on ΛQ: `c(a)ω`.
pub fn clifford_act(a: &CliffordElement, omega: &Multivector) -> Result<Multivector> {
    a.symbol.check_rank(omega)?;
    let rank = omega.rank;
    let mut out = Multivector::zero(rank)?;
    for (mask, coeff) in a.symbol.coeffs.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        // c(f_{s1}) ⋯ c(f_{sk}) ω, innermost factor first
        let mut v = omega.clone();
        for bit in (0..rank).rev() {
            if mask & (1 << bit) != 0 {
                v = lambda_action(bit + 1, &v)?;
            }
        }
        out = out.add(&v.scale(coeff))?;
    }
    Ok(out)
}

/// Product in Cl(Q): σ(ab) = c(a)σ(b).
pub fn clifford_mul(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    Ok(CliffordElement { symbol: clifford_act(a, &b.symbol)? })
}

impl CliffordElement {
    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        Ok(quantize(&Multivector::blade(rank, &[index])?))
    }

    pub fn scalar(rank: usize, s: Cx) -> Result<Self> {
        Ok(quantize(&Multivector::scalar(rank, s)?))
    }

    pub fn rank(&self) -> usize {
        self.symbol.rank
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(CliffordElement { symbol: self.symbol.add(&o.symbol)? })
    }

    /// Whether the element lies in the even or odd part of Cl(Q).
    pub fn parity(&self) -> Option<bool> {
        let mut seen = None;
        for (m, v) in self.symbol.coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let odd = m.count_ones() % 2 == 1;
            match seen {
                None => seen = Some(odd),
                Some(p) if p != odd => return None,
                _ => {}
            }
        }
        seen.or(Some(false))
    }

    /// Image in a module given the matrices of the generators `c(f_1..f_q)`.
    pub fn represent(&self, generators: &[FiberEndo<Cx>]) -> Result<FiberEndo<Cx>> {
        if generators.len() != self.rank() {
            return Err(Error::RankMismatch(generators.len(), self.rank()));
        }
        let dim = generators[0].dim();
        let mut out = FiberEndo::zeros(dim);
        for (mask, coeff) in self.symbol.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let mut m = FiberEndo::identity(dim);
            for (bit, g) in generators.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    m = m.mul(g);
                }
            }
            out.add_assign(&m.scale(coeff));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Surd;

    fn gen(q: usize, i: usize) -> CliffordElement {
        CliffordElement::generator(q, i).unwrap()
    }

    #[test]
    fn defining_relations() {
        let q = 2;
        let f1 = gen(q, 1);
        let f2 = gen(q, 2);
        let ab = clifford_mul(&f1, &f2).unwrap();
        let ba = clifford_mul(&f2, &f1).unwrap();
        assert!(symbol(&ab.add(&ba).unwrap()).is_zero());
        let sq = clifford_mul(&f1, &f1).unwrap();
        assert_eq!(sq, CliffordElement::scalar(q, Cx::from_int(-1)).unwrap());
    }

    #[test]
    fn lambda_action_examples() {
        let one = Multivector::scalar(2, Cx::one()).unwrap();
        let f1 = Multivector::blade(2, &[1]).unwrap();
        assert_eq!(lambda_action(1, &one).unwrap(), f1);
        assert_eq!(lambda_action(1, &f1).unwrap(), Multivector::scalar(2, Cx::from_int(-1)).unwrap());
        assert!(matches!(lambda_action(3, &one), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn quantize_examples() {
        let q = 2;
        let f12 = Multivector::blade(q, &[1, 2]).unwrap();
        let prod = clifford_mul(&gen(q, 1), &gen(q, 2)).unwrap();
        assert_eq!(quantize(&f12), prod);
        // σ(𝐜(f1)𝐜(f1∧f2)) = c(f1)(f1∧f2) = −f2
        let lhs = symbol(&clifford_mul(&gen(q, 1), &quantize(&f12)).unwrap());
        let f2 = Multivector::blade(q, &[2]).unwrap();
        assert_eq!(lhs, f2.scale(&Cx::from_int(-1)));
    }

    #[test]
    fn blade_orders_with_sign() {
        let a = Multivector::blade(4, &[3, 1]).unwrap();
        let b = Multivector::blade(4, &[1, 3]).unwrap();
        assert_eq!(a, b.scale(&Cx::from_int(-1)));
        assert_eq!(Multivector::blade(4, &[2, 2]).unwrap(), Multivector::zero(4).unwrap());
    }

    #[test]
    fn odd_rank_rejected() {
        assert!(matches!(Multivector::zero(3), Err(Error::OddCodimension(3))));
    }

    #[test]
    fn rank_mismatch_rejected() {
        assert!(matches!(clifford_mul(&gen(2, 1), &gen(4, 1)), Err(Error::RankMismatch(2, 4))));
    }

    #[test]
    fn matrices_match_action() {
        let (eps, iota) = exterior_matrices(2).unwrap();
        let c1 = eps[0].sub(&iota[0]);
        // c(f1)² = −1 on ΛQ
        assert_eq!(c1.mul(&c1), FiberEndo::scalar(4, Cx::real(Surd::from_int(-1))));
        assert_eq!(c1.adjoint(), c1.neg());
    }
}
