//! Exact arithmetic on even pi-periodic cosine polynomials.
//!
//! Every series produced by the pipeline lives in the algebra of finite sums
//! `c_0 + c_1 cos(2t) + c_2 cos(4t) + ...` with arbitrary-precision rational
//! coefficients. This module is that algebra: addition, products expanded by
//! cos(2it) cos(2jt) = cos(2(i+j)t)/2 + cos(2|i-j|t)/2, second derivatives,
//! coefficient projection, and the particular solution of w'' + 4w = rhs used
//! at every order of the frequency expansion.
//!
//! Sine terms and odd harmonics never occur here; the recursion preserves
//! even pi-periodic polynomials, so they are not representable.

use crate::error::SeriesError;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator by the underlying representation.
pub type Rat = BigRational;

/// `p / q` as a [`Rat`]. Panics on `q = 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer `n` as a [`Rat`].
pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Finite even cosine polynomial `sum_k coeffs[k] cos(2kt)`.
///
/// The stored vector carries no trailing zeros; the zero polynomial is the
/// empty vector and has degree 0 by convention.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CosPoly {
    coeffs: Vec<Rat>,
}

impl CosPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        CosPoly { coeffs: Vec::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Rat) -> Self {
        CosPoly::from_coeffs(vec![c])
    }

    /// The single harmonic `cos(2kt)`.
    pub fn harmonic(k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = Rat::one();
        CosPoly { coeffs }
    }

    /// Build from raw coefficients (index k multiplies cos(2kt)).
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = CosPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Largest k with a nonzero cos(2kt) coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of cos(2kt); zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// The cos(2nt)-coefficient projection P_{2n}.
    pub fn project(&self, n: usize) -> Rat {
        self.coeff(n)
    }

    /// Iterate over stored coefficients, lowest harmonic first.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Value at t = 0, i.e. the plain coefficient sum.
    pub fn coeff_sum(&self) -> Rat {
        self.coeffs.iter().fold(Rat::zero(), |acc, c| acc + c)
    }

    /// Scale every coefficient by `s`.
    pub fn scale(&self, s: &Rat) -> CosPoly {
        if s.is_zero() {
            return CosPoly::zero();
        }
        CosPoly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Second derivative: cos(2kt) picks up a factor -4k^2.
    pub fn second_derivative(&self) -> CosPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * rat_int(-4 * (k as i64) * (k as i64)))
            .collect();
        CosPoly::from_coeffs(coeffs)
    }

    /// Evaluate at time `t` in double precision.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64().unwrap_or(f64::NAN) * (2.0 * k as f64 * t).cos())
            .sum()
    }

    /// Largest bit size over all numerators and denominators. Used by the
    /// series drivers to abort runaway truncation orders.
    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(rat_bits).max().unwrap_or(0)
    }
}

/// Bit size of a rational: the larger of numerator and denominator sizes.
pub fn rat_bits(r: &Rat) -> u64 {
    r.numer().abs().bits().max(r.denom().bits())
}

impl Add for &CosPoly {
    type Output = CosPoly;
    fn add(self, rhs: &CosPoly) -> CosPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        CosPoly::from_coeffs(coeffs)
    }
}

impl Sub for &CosPoly {
    type Output = CosPoly;
    fn sub(self, rhs: &CosPoly) -> CosPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - rhs.coeff(k));
        }
        CosPoly::from_coeffs(coeffs)
    }
}

impl Neg for &CosPoly {
    type Output = CosPoly;
    fn neg(self) -> CosPoly {
        CosPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &CosPoly {
    type Output = CosPoly;
    fn mul(self, rhs: &CosPoly) -> CosPoly {
        if self.is_zero() || rhs.is_zero() {
            return CosPoly::zero();
        }
        let da = self.coeffs.len() - 1;
        let db = rhs.coeffs.len() - 1;
        let mut coeffs = vec![Rat::zero(); da + db + 1];
        let half = rat(1, 2);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b * &half;
                coeffs[i + j] += &t;
                coeffs[i.abs_diff(j)] += &t;
            }
        }
        CosPoly::from_coeffs(coeffs)
    }
}

impl fmt::Display for CosPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c}) cos({}t)", 2 * k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CosPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Unique solution of `w'' + 4w = rhs` with `w(0) = 0` (and `w'(0) = 0`,
/// which is automatic for cosine data).
///
/// Requires the resonant cos(2t) component of `rhs` to vanish; each
/// non-resonant harmonic is divided by `4 - 4k^2` and the cos(2t)
/// coefficient is then fixed so that the coefficient sum is zero.
pub fn solve_harmonic(rhs: &CosPoly) -> Result<CosPoly, SeriesError> {
    let resonant = rhs.coeff(1);
    if !resonant.is_zero() {
        return Err(SeriesError::ResonantRhs { coefficient: resonant });
    }
    if rhs.is_zero() {
        return Ok(CosPoly::zero());
    }
    let mut coeffs = vec![Rat::zero(); rhs.coeffs.len().max(2)];
    let mut balance = Rat::zero();
    for (k, c) in rhs.coeffs.iter().enumerate() {
        if k == 1 || c.is_zero() {
            continue;
        }
        let denom = rat_int(4 - 4 * (k as i64) * (k as i64));
        let w = c / denom;
        balance += &w;
        coeffs[k] = w;
    }
    coeffs[1] = -balance;
    Ok(CosPoly::from_coeffs(coeffs))
}
