//! Normal-ordered invariant differential operators.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::setup::{FiberBundleSetup, Word};
use crate::error::{Error, Result};
use crate::linalg::FiberEndo;
use crate::scalar::Scalar;

/// `Σ_w E_w ∇_{w_1}⋯∇_{w_m}` over nondecreasing words `w` (leaf indices
/// first), with constant fiber endomorphisms `E_w` and no zero terms.
#[derive(Clone, Debug)]
pub struct DiffOp<S: Scalar> {
    setup: Arc<FiberBundleSetup<S>>,
    terms: BTreeMap<Word, FiberEndo<S>>,
}

impl<S: Scalar> PartialEq for DiffOp<S> {
    fn eq(&self, o: &Self) -> bool {
        self.setup.same(&o.setup) && self.terms == o.terms
    }
}

fn is_sorted(w: &[u8]) -> bool {
    w.windows(2).all(|p| p[0] <= p[1])
}

impl<S: Scalar> DiffOp<S> {
    pub fn zero(setup: &Arc<FiberBundleSetup<S>>) -> Self {
        DiffOp { setup: setup.clone(), terms: BTreeMap::new() }
    }

    pub fn identity(setup: &Arc<FiberBundleSetup<S>>) -> Self {
        Self::endo(setup, FiberEndo::identity(setup.dim()))
    }

    pub fn scalar(setup: &Arc<FiberBundleSetup<S>>, s: S) -> Self {
        Self::endo(setup, FiberEndo::scalar(setup.dim(), s))
    }

    /// Degree-zero operator.
    pub fn endo(setup: &Arc<FiberBundleSetup<S>>, e: FiberEndo<S>) -> Self {
        let mut op = Self::zero(setup);
        op.accumulate(Vec::new(), e);
        op
    }

    /// `∇_{u_i}` (0-based frame index).
    pub fn nabla(setup: &Arc<FiberBundleSetup<S>>, i: usize) -> Self {
        let mut op = Self::zero(setup);
        op.accumulate(vec![i as u8], FiberEndo::identity(setup.dim()));
        op
    }

    /// `∇_X` for `X = Σ x_i u_i` with constant components.
    pub fn nabla_along(setup: &Arc<FiberBundleSetup<S>>, x: &[S]) -> Self {
        let mut op = Self::zero(setup);
        for (i, v) in x.iter().enumerate() {
            if !v.is_zero() {
                op.accumulate(vec![i as u8], FiberEndo::scalar(setup.dim(), v.clone()));
            }
        }
        op
    }

    /// Builds an operator from arbitrary (not necessarily ordered) words.
    pub fn from_terms(setup: &Arc<FiberBundleSetup<S>>, terms: impl IntoIterator<Item = (Word, FiberEndo<S>)>) -> Self {
        let mut op = Self::zero(setup);
        for (w, e) in terms {
            if is_sorted(&w) {
                op.accumulate(w, e);
            } else {
                for (w2, m) in setup.normal_word(&w).iter() {
                    op.accumulate(w2.clone(), e.mul(m));
                }
            }
        }
        op
    }

    fn accumulate(&mut self, w: Word, e: FiberEndo<S>) {
        debug_assert!(is_sorted(&w));
        if e.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(cur) => {
                cur.add_assign(&e);
                if cur.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, e);
            }
        }
    }

    pub fn setup(&self) -> &Arc<FiberBundleSetup<S>> {
        &self.setup
    }

    pub fn terms(&self) -> &BTreeMap<Word, FiberEndo<S>> {
        &self.terms
    }

    pub fn coefficient(&self, w: &[u8]) -> Option<&FiberEndo<S>> {
        self.terms.get(w)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.setup.same(&o.setup) {
            Ok(())
        } else {
            Err(Error::SetupMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (w, e) in &o.terms {
            out.accumulate(w.clone(), e.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|e| e.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_coefficients(|e| e.scale(s))
    }

    /// `E ∘ self` for a constant endomorphism `E`.
    pub fn left_mul(&self, e: &FiberEndo<S>) -> Self {
        self.map_coefficients(|c| e.mul(c))
    }

    fn map_coefficients(&self, f: impl Fn(&FiberEndo<S>) -> FiberEndo<S>) -> Self {
        let mut out = Self::zero(&self.setup);
        for (w, e) in &self.terms {
            out.accumulate(w.clone(), f(e));
        }
        out
    }

    /// Normal-ordered product `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let setup = &self.setup;
        let mut out = Self::zero(setup);
        for (wa, ea) in &self.terms {
            for (wb, eb) in &o.terms {
                for (e1, s) in setup.push_through(wa, eb) {
                    let left = ea.mul(&e1);
                    let mut word = s;
                    word.extend_from_slice(wb);
                    for (w2, m) in setup.normal_word(&word).iter() {
                        out.accumulate(w2.clone(), left.mul(m));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint for the invariant volume, from
    /// `(∇_u)* = −∇_u − div u` and `E* = Ē^T`.
    pub fn adjoint(&self) -> Result<Self> {
        let deg = self.degree();
        if deg > 2 {
            return Err(Error::DegreeTooHigh(deg));
        }
        let setup = &self.setup;
        let mut out = Self::zero(setup);
        for (w, e) in &self.terms {
            let mut op = Self::endo(setup, e.adjoint());
            for &i in w {
                let i = i as usize;
                let star = Self::nabla(setup, i).neg().sub(&Self::scalar(setup, setup.divergence(i).clone()))?;
                op = star.compose(&op)?;
            }
            out = out.add(&op)?;
        }
        Ok(out)
    }

    /// Renders a word with frame labels, e.g. `∇f1∇f2`; `1` for the empty word.
    pub fn word_label(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&i| format!("∇{}", self.setup.data.model.label(i as usize))).collect()
    }
}
