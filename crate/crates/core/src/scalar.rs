//! Exact scalars.
//!
//! [`Surd`] is an element of ℚ(√2), stored as `rat + sqrt2·√2`; [`Cx`] is a
//! complex number with both parts in ℚ(√2). The [`Scalar`] trait abstracts
//! over these exact values and `Complex64`, so that the operator calculus can
//! be run either as an exact identity checker or as a floating-point
//! assembler for lattice discretizations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Element `rat + sqrt2·√2` of the real quadratic field ℚ(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub rat: BigRational,
    pub sqrt2: BigRational,
}

impl Surd {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        Surd { rat, sqrt2 }
    }

    pub fn zero() -> Self {
        Surd::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Surd::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Surd::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Surd::new(BigRational::new(n.into(), d.into()), BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Surd::new(r, BigRational::zero())
    }

    /// √2 itself.
    pub fn sqrt2() -> Self {
        Surd::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    /// Galois conjugate `rat − sqrt2·√2`.
    pub fn galois(&self) -> Self {
        Surd::new(self.rat.clone(), -self.sqrt2.clone())
    }

    /// Field norm `rat² − 2·sqrt2²`; zero only for zero.
    pub fn field_norm(&self) -> BigRational {
        let two = BigRational::from_integer(2.into());
        &self.rat * &self.rat - two * &self.sqrt2 * &self.sqrt2
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.field_norm();
        Some(Surd::new(&self.rat / &n, -&self.sqrt2 / &n))
    }

    /// Exact sign in the real embedding √2 > 0.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.sqrt2.cmp(&BigRational::zero());
        match (a, b) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (x, _) => {
                // opposite signs: |rat| vs √2|sqrt2|
                let lhs = &self.rat * &self.rat;
                let rhs = BigRational::from_integer(2.into()) * &self.sqrt2 * &self.sqrt2;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.rat.to_f64().unwrap_or(f64::NAN)
            + self.sqrt2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Square root inside ℚ(√2) for non-negative rationals of the form `s²`
    /// or `2s²`; `None` otherwise.
    pub fn sqrt_of_rational(r: &BigRational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Surd::zero());
        }
        let num = r.numer();
        let den = r.denom();
        // √(n/d) = √(n·d)/d
        let nd = num * den;
        if let Some(s) = exact_isqrt(&nd) {
            return Some(Surd::from_rational(BigRational::new(s, den.clone())));
        }
        // √(n/d) = √2 · √(n·d/2)/d  when 2·n·d is a square
        let two_nd = &nd * BigInt::from(2);
        if let Some(s) = exact_isqrt(&two_nd) {
            return Some(Surd::new(
                BigRational::zero(),
                BigRational::new(s, den.clone() * BigInt::from(2)),
            ));
        }
        None
    }

    /// Closest element of the form `p/q` or `(p/q)√2` with `q ≤ max_den`,
    /// used to snap floating-point estimates before exact verification.
    pub fn snap(x: f64, max_den: i64) -> Vec<Surd> {
        let mut out = Vec::new();
        if let Some(r) = best_rational(x, max_den) {
            out.push(Surd::from_rational(r));
        }
        if let Some(r) = best_rational(x / std::f64::consts::SQRT_2, max_den) {
            out.push(Surd::new(BigRational::zero(), r));
        }
        out
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Continued-fraction best approximation with bounded denominator.
fn best_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(p1), BigInt::from(q1)))
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd::new(self.rat + o.rat, self.sqrt2 + o.sqrt2)
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        Surd::new(&self.rat + &o.rat, &self.sqrt2 + &o.sqrt2)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        Surd::new(self.rat - o.rat, self.sqrt2 - o.sqrt2)
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, o: &Surd) -> Surd {
        Surd::new(&self.rat - &o.rat, &self.sqrt2 - &o.sqrt2)
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        if self.sqrt2.is_zero() && o.sqrt2.is_zero() {
            return Surd::from_rational(&self.rat * &o.rat);
        }
        let two = BigRational::from_integer(2.into());
        Surd::new(
            &self.rat * &o.rat + two * &self.sqrt2 * &o.sqrt2,
            &self.rat * &o.sqrt2 + &self.sqrt2 * &o.rat,
        )
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        &self * &o
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-self.rat, -self.sqrt2)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.sqrt2.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.rat)),
            (true, false) => write!(f, "{}√2", fmt_rational(&self.sqrt2)),
            (false, false) => {
                let sign = if self.sqrt2.is_negative() { "-" } else { "+" };
                write!(
                    f,
                    "{}{}{}√2",
                    fmt_rational(&self.rat),
                    sign,
                    fmt_rational(&self.sqrt2.abs())
                )
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a coefficient of √2 (`"√2"`, `"-√2"`, `"3/4√2"`); the trailing
/// marker has already been removed.
fn parse_sqrt2_coeff(s: &str) -> Result<BigRational> {
    match s.trim() {
        "" | "+" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        t => parse_rational(t.strip_prefix('+').unwrap_or(t)),
    }
}

impl FromStr for Surd {
    type Err = Error;

    /// Accepts `a`, `a/b`, `c/d√2` and `a/b+c/d√2` (also `sqrt2` for `√2`).
    fn from_str(s: &str) -> Result<Surd> {
        let s = s.trim().replace("sqrt2", "√2").replace(' ', "");
        if let Some(body) = s.strip_suffix("√2") {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            match split {
                Some(i) if !body[..i].ends_with('/') => {
                    let rat = parse_rational(&body[..i])?;
                    let coeff = parse_sqrt2_coeff(&body[i..])?;
                    Ok(Surd::new(rat, coeff))
                }
                _ => Ok(Surd::new(BigRational::zero(), parse_sqrt2_coeff(body)?)),
            }
        } else {
            Ok(Surd::from_rational(parse_rational(&s)?))
        }
    }
}

/// Complex number with real and imaginary parts in ℚ(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cx {
    pub re: Surd,
    pub im: Surd,
}

impl Cx {
    pub fn new(re: Surd, im: Surd) -> Self {
        Cx { re, im }
    }

    pub fn real(re: Surd) -> Self {
        Cx::new(re, Surd::zero())
    }

    pub fn imag(im: Surd) -> Self {
        Cx::new(Surd::zero(), im)
    }

    pub fn from_int(n: i64) -> Self {
        Cx::real(Surd::from_int(n))
    }

    pub fn norm_sqr(&self) -> Surd {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn inv(&self) -> Option<Cx> {
        let n = self.norm_sqr().inv()?;
        Some(Cx::new(&self.re * &n, -(&self.im * &n)))
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})i", self.im),
            _ => write!(f, "{} + ({})i", self.re, self.im),
        }
    }
}

impl FromStr for Cx {
    type Err = Error;

    /// Accepts a real surd, or a purely imaginary one with an `i` suffix
    /// (`"-1i"`, `"1/2i"`, `"i"`, `"-i"`).
    fn from_str(s: &str) -> Result<Cx> {
        let t = s.trim().replace(' ', "");
        match t.strip_suffix('i') {
            Some("") | Some("+") => Ok(Cx::imag(Surd::one())),
            Some("-") => Ok(Cx::imag(-Surd::one())),
            Some(body) => Ok(Cx::imag(body.parse()?)),
            None => Ok(Cx::real(t.parse()?)),
        }
    }
}

/// Field operations needed by the operator calculus and the fiber algebra.
///
/// Implemented exactly by [`Cx`] and approximately by `Complex64`.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn conj(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn from_cx(c: &Cx) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Whether equality tests on this type are exact.
    const EXACT: bool;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_cx(&Cx::real(Surd::from_ratio(n, d)))
    }

    fn from_surd(s: &Surd) -> Self {
        Self::from_cx(&Cx::real(s.clone()))
    }

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
}

impl Scalar for Cx {
    const EXACT: bool = true;

    fn zero() -> Self {
        Cx::real(Surd::zero())
    }
    fn one() -> Self {
        Cx::real(Surd::one())
    }
    fn i() -> Self {
        Cx::imag(Surd::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        Cx::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn minus(&self, o: &Self) -> Self {
        Cx::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn times(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Cx::real(&self.re * &o.re);
        }
        Cx::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }
    fn negated(&self) -> Self {
        Cx::new(-self.re.clone(), -self.im.clone())
    }
    fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
    fn from_cx(c: &Cx) -> Self {
        c.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn inverse(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn from_cx(c: &Cx) -> Self {
        c.to_c64()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}
