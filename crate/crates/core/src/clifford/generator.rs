//! Random compatible pairs `(B, J)` and the fiber property battery.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::spinor::ComplexStructure;
use super::two_form::{fiber_checks, TwoForm};
use crate::error::{Error, Result};
use crate::linalg::SurdMatrix;
use crate::scalar::Surd;

/// Random rational orthogonal matrix: Cayley transform of a small integer
/// skew matrix.
pub fn random_orthogonal<R: Rng>(q: usize, rng: &mut R) -> SurdMatrix {
    let mut vals = vec![vec![0i64; q]; q];
    for r in 0..q {
        for c in r + 1..q {
            let v = rng.gen_range(-2..=2);
            vals[r][c] = v;
            vals[c][r] = -v;
        }
    }
    let a = SurdMatrix::from_fn(q, |r, c| Surd::from_int(vals[r][c]));
    SurdMatrix::cayley(&a).expect("I + A is invertible for skew A")
}

/// Random rational orthogonal matrix commuting with the standard `J₀`: the
/// Cayley transform of the real form of a random anti-Hermitian matrix.
pub fn random_unitary<R: Rng>(l: usize, rng: &mut R) -> SurdMatrix {
    // (re, im) of an l×l anti-Hermitian matrix
    let mut re = vec![vec![0i64; l]; l];
    let mut im = vec![vec![0i64; l]; l];
    for r in 0..l {
        im[r][r] = rng.gen_range(-2..=2);
        for c in r + 1..l {
            let (x, y) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            re[r][c] = x;
            re[c][r] = -x;
            im[r][c] = y;
            im[c][r] = y;
        }
    }
    // z = x + iy acts on (f_{2j−1}, f_{2j}) as [[x, −y], [y, x]]
    let h = SurdMatrix::from_fn(2 * l, |r, c| {
        let (x, y) = (re[r / 2][c / 2], im[r / 2][c / 2]);
        Surd::from_int(match (r % 2, c % 2) {
            (0, 0) | (1, 1) => x,
            (0, 1) => -y,
            _ => y,
        })
    });
    SurdMatrix::cayley(&h).expect("I + H is invertible for skew H")
}

/// A compatible pair: `J = O J₀ Oᵀ` and `B = (OU) B₀ (OU)ᵀ` with `U`
/// commuting with `J₀` and `B₀` standard with random `μ_j > 0`.
pub fn random_compatible_pair<R: Rng>(q: usize, rng: &mut R) -> Result<(TwoForm, ComplexStructure)> {
    if q == 0 || q % 2 == 1 {
        return Err(Error::OddCodimension(q));
    }
    let l = q / 2;
    let o = random_orthogonal(q, rng);
    let u = random_unitary(l, rng);
    let mus: Vec<Surd> = (0..l).map(|_| Surd::from_ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))).collect();
    let j0 = ComplexStructure::standard(q)?;
    let jm = o.mul(j0.matrix()).mul(&o.transpose());
    let j = ComplexStructure::with_frame(jm, o.clone())?;
    let w = o.mul(&u);
    let b = TwoForm::standard(&mus).conjugate_by(&w.transpose());
    Ok((b, j))
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberFailure {
    pub trial: usize,
    pub b: Vec<Vec<String>>,
    pub j: Vec<Vec<String>>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberBatteryReport {
    pub q: usize,
    pub seed: u64,
    pub trials: usize,
    pub rl1_exact: usize,
    pub bound_ok: usize,
    /// Smallest margin `min_eig + (λ − 2m)` over all trials.
    pub min_margin: Option<String>,
    pub failures: Vec<FiberFailure>,
}

impl FiberBatteryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn surd_strings(m: &SurdMatrix) -> Vec<Vec<String>> {
    (0..m.n()).map(|r| (0..m.n()).map(|c| m.get(r, c).to_string()).collect()).collect()
}

/// Runs `trials` random compatible pairs in codimension `q`, checking
/// `c(R^L)u = −λu` on Λ^{0,0} and `min spec c(R^L)|odd ≥ −(λ − 2m)` exactly.
pub fn fiber_battery(q: usize, trials: usize, seed: u64) -> Result<FiberBatteryReport> {
    if q == 0 || q % 2 == 1 {
        return Err(Error::OddCodimension(q));
    }
    let outcomes: Vec<(bool, bool, Option<Surd>, Option<FiberFailure>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let (b, j) = random_compatible_pair(q, &mut rng).expect("even codimension");
            let fail = |reason: String| FiberFailure {
                trial: t,
                b: b.to_strings(),
                j: surd_strings(j.matrix()),
                reason,
            };
            match fiber_checks(&b, &j) {
                Err(e) => (false, false, None, Some(fail(e.to_string()))),
                Ok((rl1, bound)) => {
                    let failure = if !rl1.exact_zero {
                        Some(fail(format!("Λ^{{0,0}} residual {:e}", rl1.residual)))
                    } else if bound.margin.is_negative() {
                        Some(fail(format!("negative margin {}", bound.margin)))
                    } else {
                        None
                    };
                    (rl1.exact_zero, !bound.margin.is_negative(), Some(bound.margin), failure)
                }
            }
        })
        .collect();
    let mut report = FiberBatteryReport {
        q,
        seed,
        trials,
        rl1_exact: 0,
        bound_ok: 0,
        min_margin: None,
        failures: Vec::new(),
    };
    let mut min_margin: Option<Surd> = None;
    for (rl1_ok, bound_ok, margin, failure) in outcomes {
        report.rl1_exact += rl1_ok as usize;
        report.bound_ok += bound_ok as usize;
        if let Some(m) = margin {
            if min_margin.as_ref().map_or(true, |cur| m < *cur) {
                min_margin = Some(m);
            }
        }
        report.failures.extend(failure);
    }
    report.min_margin = min_margin.map(|m| m.to_string());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::two_form::check_compatible;

    #[test]
    fn generated_pairs_are_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for q in [2, 4, 6] {
            for _ in 0..5 {
                let (b, j) = random_compatible_pair(q, &mut rng).unwrap();
                check_compatible(&b, &j).unwrap();
            }
        }
    }

    #[test]
    fn unitary_commutes_with_standard_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(3, &mut rng);
        let j0 = ComplexStructure::standard(6).unwrap();
        assert_eq!(u.mul(j0.matrix()), j0.matrix().mul(&u));
        assert!(u.transpose().mul(&u).sub(&SurdMatrix::identity(6)).is_zero());
    }

    #[test]
    fn small_battery_passes() {
        let r = fiber_battery(4, 20, 7).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.rl1_exact, 20);
    }

    #[test]
    fn zero_trials() {
        let r = fiber_battery(2, 0, 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.min_margin, None);
    }

    #[test]
    fn odd_codimension() {
        assert!(matches!(fiber_battery(3, 1, 0), Err(Error::OddCodimension(3))));
    }
}
