//! Homogeneous foliated models given by the structure constants of an
//! invariant orthonormal frame.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Surd;

/// Frame `u_1..u_n`: the first `p` span the leaves (`e_i`), the remaining
/// `q` are horizontal (`f_α`). Indices are 0-based internally.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameModel {
    pub name: String,
    p: usize,
    q: usize,
    /// `c^k_{ij}` at `(i·n + j)·n + k`.
    c: Vec<Surd>,
}

impl FrameModel {
    /// From a list of brackets `[u_i, u_j] ∋ v·u_k` (0-based). A bracket
    /// given in only one order is extended antisymmetrically; entries given
    /// in both orders are kept as stated.
    pub fn from_brackets(name: &str, p: usize, q: usize, brackets: &[(usize, usize, usize, Surd)]) -> Result<Self> {
        let n = p + q;
        let mut explicit: BTreeMap<(usize, usize, usize), Surd> = BTreeMap::new();
        for (i, j, k, v) in brackets {
            if *i >= n || *j >= n || *k >= n {
                return Err(Error::InvalidModel(format!("bracket index out of range 1..={n}")));
            }
            let e = explicit.entry((*i, *j, *k)).or_insert_with(Surd::zero);
            *e = &*e + v;
        }
        let mut c = vec![Surd::zero(); n * n * n];
        for (&(i, j, k), v) in &explicit {
            c[(i * n + j) * n + k] = v.clone();
            if i != j && !explicit.contains_key(&(j, i, k)) {
                c[(j * n + i) * n + k] = -v.clone();
            }
        }
        Ok(FrameModel { name: name.to_string(), p, q, c })
    }

    /// The abelian model `T^{p+q}`.
    pub fn torus(name: &str, p: usize, q: usize) -> Self {
        let n = p + q;
        FrameModel { name: name.to_string(), p, q, c: vec![Surd::zero(); n * n * n] }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        i < self.p
    }

    /// Frame index of `f_α` (0-based α).
    pub fn horizontal(&self, alpha: usize) -> usize {
        self.p + alpha
    }

    /// `c^k_{ij}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Surd {
        let n = self.n();
        &self.c[(i * n + j) * n + k]
    }

    pub fn set_c(&mut self, i: usize, j: usize, k: usize, v: Surd) {
        let n = self.n();
        self.c[(i * n + j) * n + k] = v;
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Surd::is_zero)
    }

    /// `e3`, `f1`, … for messages.
    pub fn label(&self, i: usize) -> String {
        if i < self.p {
            format!("e{}", i + 1)
        } else {
            format!("f{}", i - self.p + 1)
        }
    }

    /// Nonzero brackets `(i, j, k, c^k_{ij})` with `i < j`.
    pub fn brackets(&self) -> Vec<(usize, usize, usize, Surd)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.c(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    EvenCodimension,
    Antisymmetry,
    Jacobi,
    Involutivity,
    BundleLike,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::EvenCodimension => "even codimension",
            Condition::Antisymmetry => "antisymmetry",
            Condition::Jacobi => "Jacobi identity",
            Condition::Involutivity => "involutivity of the leaf distribution",
            Condition::BundleLike => "bundle-like metric",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    /// In check order; the first entry is the first violated condition.
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidModel(format!("{} fails: {}", v.condition, v.message))),
        }
    }
}

/// Checks the standing hypotheses on the frame data.
pub fn validate(model: &FrameModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = model.n();
    let l = |i| model.label(i);
    let mut push = |condition, message| report.violations.push(Violation { condition, message });
    if model.q == 0 || model.q % 2 == 1 {
        push(Condition::EvenCodimension, format!("q = {}", model.q));
    }
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let s = model.c(i, j, k) + model.c(j, i, k);
                if !s.is_zero() {
                    push(
                        Condition::Antisymmetry,
                        format!("c^{}_{{{}{}}} + c^{}_{{{}{}}} = {s}", l(k), l(i), l(j), l(k), l(j), l(i)),
                    );
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for m in 0..n {
                    // [[u_i,u_j],u_k] + [[u_j,u_k],u_i] + [[u_k,u_i],u_j], component m
                    let mut s = Surd::zero();
                    for r in 0..n {
                        s = &s + &(model.c(i, j, r) * model.c(r, k, m));
                        s = &s + &(model.c(j, k, r) * model.c(r, i, m));
                        s = &s + &(model.c(k, i, r) * model.c(r, j, m));
                    }
                    if !s.is_zero() {
                        push(
                            Condition::Jacobi,
                            format!("cyclic sum over ({}, {}, {}) has {}-component {s}", l(i), l(j), l(k), l(m)),
                        );
                    }
                }
            }
        }
    }
    for i in 0..model.p {
        for j in 0..model.p {
            for a in model.p..n {
                let v = model.c(i, j, a);
                if !v.is_zero() {
                    push(
                        Condition::Involutivity,
                        format!("[{}, {}] has {}-component {v}", l(i), l(j), l(a)),
                    );
                }
            }
        }
    }
    for i in 0..model.p {
        for a in model.p..n {
            for b in a..n {
                let s = model.c(i, a, b) + model.c(i, b, a);
                if !s.is_zero() {
                    push(
                        Condition::BundleLike,
                        format!(
                            "c^{}_{{{}{}}} + c^{}_{{{}{}}} = {s} ≠ 0",
                            l(b),
                            l(i),
                            l(a),
                            l(a),
                            l(i),
                            l(b)
                        ),
                    );
                }
            }
        }
    }
    for i in 0..n {
        let tr = (0..n).fold(Surd::zero(), |acc, j| &acc + model.c(j, i, j));
        if !tr.is_zero() {
            report.warnings.push(format!("not unimodular: tr ad({}) = {}", l(i), -tr));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Surd {
        Surd::one()
    }

    #[test]
    fn torus_passes() {
        assert!(FrameModel::torus("t3", 1, 2).validate().passed());
    }

    #[test]
    fn heisenberg_passes() {
        let m = FrameModel::from_brackets("heis", 1, 2, &[(1, 2, 0, one())]).unwrap();
        let r = m.validate();
        assert!(r.passed(), "{r:?}");
        assert!(r.warnings.is_empty());
        assert_eq!(m.c(2, 1, 0), &-one());
    }

    #[test]
    fn bundle_like_failure_is_named() {
        let m = FrameModel::from_brackets("bad", 1, 2, &[(0, 1, 2, one())]).unwrap();
        let r = m.validate();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].condition, Condition::BundleLike);
        assert!(r.violations[0].message.contains("= 1"), "{}", r.violations[0].message);
    }

    #[test]
    fn inconsistent_antisymmetry_detected() {
        let m = FrameModel::from_brackets("x", 1, 2, &[(1, 2, 0, one()), (2, 1, 0, one())]).unwrap();
        assert_eq!(m.validate().violations[0].condition, Condition::Antisymmetry);
    }

    #[test]
    fn jacobi_failure_detected() {
        // [f1,f2] = e1 and [e1,f1] = f1 is not a Lie algebra
        let m = FrameModel::from_brackets("x", 1, 2, &[(1, 2, 0, one()), (0, 1, 1, one())]).unwrap();
        assert!(m.validate().violations.iter().any(|v| v.condition == Condition::Jacobi));
    }

    #[test]
    fn odd_codimension_and_unimodularity_warning() {
        let m = FrameModel::torus("t", 1, 3);
        assert_eq!(m.validate().violations[0].condition, Condition::EvenCodimension);
        // ax+b algebra in the horizontal plane: [f1,f2] = f2
        let m = FrameModel::from_brackets("aff", 1, 2, &[(1, 2, 2, one())]).unwrap();
        let r = m.validate();
        assert!(r.passed());
        assert_eq!(r.warnings.len(), 1);
    }
}
