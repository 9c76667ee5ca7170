//! Truncated power series: elements of the Wiener disc algebra kept modulo
//! `z^(N+1)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Default absolute tolerance for coefficientwise series comparison.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;

/// Coefficients `a_0, ..., a_N` of `f(z) = sum a_n z^n`, truncated at order `N`.
///
/// Never empty: the zero series of order 0 is `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("a series needs at least one coefficient"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// `z^n` stored at order `max(n, order)`.
    pub fn monomial(n: usize, order: usize) -> Self {
        let mut s = Self::zero(order.max(n));
        s.coeffs[n] = Complex64::new(1.0, 0.0);
        s
    }

    /// Builds a series of the given order from a coefficient rule.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { coeffs: (0..=order).map(f).collect() }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^n`; zero beyond the stored order.
    #[inline]
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// `f(0)`.
    #[inline]
    pub fn head(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Same function, re-truncated (or zero-padded) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        Self::from_fn(order, |n| self.coeff(n))
    }

    /// `||f||_w = sum |a_n|`.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Value of the stored polynomial at any `z` (Horner).
    pub fn polynomial_value(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `f(z)` for a point of the open unit disc.
    pub fn evaluate(&self, p: DiscPoint) -> Complex64 {
        self.polynomial_value(p.value())
    }

    /// `f(s z)`, i.e. coefficients `a_n s^n`. With `s = q` this is `Lambda_q f`.
    pub fn scale_argument(&self, s: Complex64) -> Self {
        let mut pow = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * pow;
                pow *= s;
                out
            })
            .collect();
        Self { coeffs }
    }

    /// Largest coefficientwise deviation, comparing up to the larger order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order().max(other.order());
        (0..=n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, nan_max)
    }

    /// Largest deviation over coefficients `0..=upto` only.
    pub fn max_abs_diff_upto(&self, other: &Self, upto: usize) -> f64 {
        (0..=upto).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, nan_max)
    }

    /// Coefficientwise comparison: `|a_n - b_n| <= abs_tol`, falling back to
    /// `rel_tol * max(|a_n|, |b_n|)` for large coefficients.
    pub fn approx_eq(&self, other: &Self, abs_tol: f64, rel_tol: f64) -> bool {
        let n = self.order().max(other.order());
        (0..=n).all(|k| {
            let (a, b) = (self.coeff(k), other.coeff(k));
            let d = (a - b).norm();
            d <= abs_tol || d <= rel_tol * a.norm().max(b.norm())
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let n = self.order().max(other.order());
        Self::from_fn(n, |k| op(self.coeff(k), other.coeff(k)))
    }
}

/// Cauchy (pointwise) product truncated at `out_order`:
/// `c_n = sum_{k<=n} a_k b_{n-k}`.
/// `max(a, b)` that propagates NaN, so a failed evaluation cannot hide
/// inside an error maximum.
pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

pub fn cauchy_product(f: &TruncatedSeries, g: &TruncatedSeries, out_order: usize) -> TruncatedSeries {
    TruncatedSeries::from_fn(out_order, |n| {
        let lo = n.saturating_sub(g.order());
        let hi = n.min(f.order());
        (lo..=hi).map(|k| f.coeffs[k] * g.coeffs[n - k]).sum()
    })
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Complex64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

/// A point `z` of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 {
            return Err(domain(format!("|z| = {} is not inside the unit disc", z.norm())));
        }
        Ok(Self(z))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }
}
