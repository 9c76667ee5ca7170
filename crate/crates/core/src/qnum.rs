//! q-arithmetic: q-integers, q-factorials, Gaussian binomials and
//! q-Pochhammer products for a fixed base `0 < q < 1`.
//!
//! Conventions: `[0]_q = 0` and `[0]_q! = 1`, so that `[n]_q = (1 - q^n)/(1 - q)`
//! holds for every `n >= 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Lower end of the default admissible band for `q`.
pub const DEFAULT_Q_MIN: f64 = 1e-6;
/// Upper end of the default admissible band for `q`.
pub const DEFAULT_Q_MAX: f64 = 1.0 - 1e-6;
/// Default capacity of a [`QArithmetic`] table.
pub const DEFAULT_MAX_N: usize = 256;

/// The deformation parameter, guaranteed to lie strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct QParam(f64);

impl QParam {
    /// Accepts `q` in the default guard band `[1e-6, 1 - 1e-6]`.
    pub fn new(q: f64) -> Result<Self> {
        Self::with_guard(q, DEFAULT_Q_MIN, DEFAULT_Q_MAX)
    }

    /// Accepts `q` in `[q_min, q_max]`, where the band itself must sit inside `(0, 1)`.
    pub fn with_guard(q: f64, q_min: f64, q_max: f64) -> Result<Self> {
        if !(q_min > 0.0 && q_max < 1.0 && q_min <= q_max) {
            return Err(domain(format!(
                "invalid q guard band [{q_min}, {q_max}]; need 0 < q_min <= q_max < 1"
            )));
        }
        if !q.is_finite() || q < q_min || q > q_max {
            return Err(domain(format!(
                "q = {q} outside the admissible band [{q_min}, {q_max}]"
            )));
        }
        Ok(Self(q))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `q^n` for a nonnegative exponent.
    #[inline]
    pub fn pow(self, n: usize) -> f64 {
        pow_usize(self.0, n)
    }
}

impl<'de> Deserialize<'de> for QParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = f64::deserialize(d)?;
        QParam::new(q).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        QParam::new(q)
    }
}

pub(crate) fn pow_usize(x: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(n) => x.powi(n),
        Err(_) => x.powf(n as f64),
    }
}

/// `[n]_q = (1 - q^n) / (1 - q)`.
pub fn q_integer(n: usize, q: QParam) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let q = q.value();
    // 1 - q^n via expm1 keeps full relative accuracy when q is close to 1.
    -(n as f64 * q.ln()).exp_m1() / (1.0 - q)
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
///
/// Returns [`Error::Overflow`] if the product leaves the finite range, which
/// only happens for `q` near 1 and `n` beyond 170.
pub fn q_factorial(n: usize, q: QParam) -> Result<f64> {
    let v = (1..=n).fold(1.0, |acc, j| acc * q_integer(j, q));
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("[{n}]_q! at q = {}", q.value())))
    }
}

/// Gaussian binomial `[n choose k]_q`, evaluated as a product of ratios of
/// q-integers so that it never overflows for moderate `n`.
pub fn q_binomial(n: usize, k: usize, q: QParam) -> Result<f64> {
    if k > n {
        return Err(domain(format!("q_binomial needs 0 <= k <= n, got n = {n}, k = {k}")));
    }
    let k = k.min(n - k);
    Ok((1..=k).fold(1.0, |acc, i| {
        acc * q_integer(n - k + i, q) / q_integer(i, q)
    }))
}

/// Finite q-Pochhammer symbol `(a; q)_n = (1 - a)(1 - aq)...(1 - aq^{n-1})`.
pub fn q_pochhammer(a: Complex64, q: QParam, n: usize) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut aqk = a;
    for _ in 0..n {
        prod *= Complex64::new(1.0, 0.0) - aqk;
        aqk *= q.value();
    }
    prod
}

/// A truncated infinite product together with the number of factors used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteProduct {
    pub value: Complex64,
    pub terms: usize,
}

/// Hard ceiling on the number of factors in [`q_pochhammer_infinite`].
const MAX_PRODUCT_TERMS: usize = 1_000_000;

/// `(a; q)_inf`, truncated once the remaining factors provably move the
/// partial product by less than `tol`.
///
/// With `P_K` the product of the first `K` factors, the tail satisfies
/// `|P_inf - P_K| <= |P_K| (exp(|a| q^K / (1 - q)) - 1)`; truncation happens at
/// the first `K` where that bound drops below `tol`.
pub fn q_pochhammer_infinite(a: Complex64, q: QParam, tol: f64) -> Result<InfiniteProduct> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let qv = q.value();
    let mut prod = Complex64::new(1.0, 0.0);
    let mut aqk = a;
    let mut k = 0;
    loop {
        let tail = (aqk.norm() / (1.0 - qv)).exp_m1();
        if prod.norm() * tail < tol || aqk.norm() == 0.0 {
            return Ok(InfiniteProduct { value: prod, terms: k });
        }
        if k >= MAX_PRODUCT_TERMS {
            return Err(Error::Overflow(format!(
                "(a; q)_inf did not reach tolerance {tol:e} within {MAX_PRODUCT_TERMS} factors"
            )));
        }
        prod *= Complex64::new(1.0, 0.0) - aqk;
        aqk *= qv;
        k += 1;
    }
}

/// Precomputed q-integers and q-factorials for a fixed `q`.
///
/// Immutable after construction; cheap to share between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct QArithmetic {
    q: QParam,
    q_int: Vec<f64>,
    q_fact: Vec<f64>,
}

impl QArithmetic {
    /// Tables for `0 <= n <= max_n`.
    pub fn new(q: QParam, max_n: usize) -> Self {
        let q_int: Vec<f64> = (0..=max_n).map(|n| q_integer(n, q)).collect();
        let mut q_fact = Vec::with_capacity(max_n + 1);
        q_fact.push(1.0);
        for n in 1..=max_n {
            q_fact.push(q_fact[n - 1] * q_int[n]);
        }
        Self { q, q_int, q_fact }
    }

    pub fn with_default_capacity(q: QParam) -> Self {
        Self::new(q, DEFAULT_MAX_N)
    }

    #[inline]
    pub fn q(&self) -> QParam {
        self.q
    }

    /// Largest `n` the tables hold.
    #[inline]
    pub fn max_n(&self) -> usize {
        self.q_int.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.max_n() {
            Err(Error::Capacity { index: n, capacity: self.max_n() })
        } else {
            Ok(())
        }
    }

    pub fn integer(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.q_int[n])
    }

    pub fn factorial(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        let v = self.q_fact[n];
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow(format!("[{n}]_q! at q = {}", self.q.value())))
        }
    }

    pub fn binomial(&self, n: usize, k: usize) -> Result<f64> {
        self.check(n)?;
        if k > n {
            return Err(domain(format!("q_binomial needs 0 <= k <= n, got n = {n}, k = {k}")));
        }
        let k = k.min(n - k);
        Ok((1..=k).fold(1.0, |acc, i| acc * self.q_int[n - k + i] / self.q_int[i]))
    }

    /// The table of q-integers `[0]_q, ..., [max_n]_q`.
    pub fn integers(&self) -> &[f64] {
        &self.q_int
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn guard_band_rejects_endpoints() {
        assert!(QParam::new(0.0).is_err());
        assert!(QParam::new(1.0).is_err());
        assert!(QParam::new(1.0 - 1e-7).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert!(QParam::new(0.5).is_ok());
        assert!(QParam::with_guard(0.5, 0.6, 0.9).is_err());
        assert!(QParam::with_guard(0.5, 0.0, 0.9).is_err());
    }

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(0, q(0.3)), 0.0);
        assert!(close(q_integer(2, q(0.5)), 1.5, 1e-15));
        // (q;q)_5 / (1-q)^5 evaluated independently.
        let qv = 0.3_f64;
        let poch: f64 = (1..=5).map(|j| 1.0 - qv.powi(j)).product();
        let oracle = poch / (1.0 - qv).powi(5)
            / (1..=4).map(|j| (1.0 - qv.powi(j)) / (1.0 - qv)).product::<f64>();
        assert!(close(q_integer(5, q(0.3)), oracle, 1e-14));
        assert!(close(q_integer(5, q(0.3)), 1.0 + 0.3 + 0.09 + 0.027 + 0.0081, 1e-14));
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, q(0.7)).unwrap(), 1.0);
        assert!(close(q_factorial(3, q(0.5)).unwrap(), 1.0 * 1.5 * 1.75, 1e-15));
        assert!(close(q_factorial(3, q(0.5)).unwrap(), 2.625, 1e-15));
    }

    #[test]
    fn classical_limit() {
        let qq = q(1.0 - 1e-4);
        let mut fact = 1.0;
        for n in 0..=20usize {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((q_integer(n, qq) - n as f64).abs() <= 1e-2 * (n as f64).max(1.0));
            assert!((q_factorial(n, qq).unwrap() - fact).abs() < 1e-2 * fact);
        }
    }

    #[test]
    fn q_binomial_examples() {
        let qq = q(0.5);
        for n in 0..10 {
            assert_eq!(q_binomial(n, 0, qq).unwrap(), 1.0);
            for k in 0..=n {
                assert_eq!(q_binomial(n, k, qq).unwrap(), q_binomial(n, n - k, qq).unwrap());
            }
        }
        // Gaussian polynomial (1 + q^2)(1 + q + q^2) at q = 0.5.
        let oracle = (1.0 + 0.25) * (1.0 + 0.5 + 0.25);
        assert!(close(q_binomial(4, 2, qq).unwrap(), oracle, 1e-15));
        assert!(close(oracle, 2.1875, 0.0));
        assert!(matches!(q_binomial(3, 4, qq), Err(Error::Domain(_))));
    }

    #[test]
    fn q_binomial_at_least_one_and_pascal() {
        for &qv in &[0.1, 0.3, 0.5, 0.9, 0.99] {
            let qq = q(qv);
            for n in 1..40 {
                for k in 1..n {
                    let b = q_binomial(n, k, qq).unwrap();
                    assert!(b >= 1.0, "n={n} k={k} q={qv}: {b}");
                    let pascal = q_binomial(n - 1, k - 1, qq).unwrap()
                        + qq.pow(k) * q_binomial(n - 1, k, qq).unwrap();
                    assert!(close(b, pascal, 1e-13), "pascal n={n} k={k} q={qv}");
                }
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        let qq = q(0.5);
        let a = Complex64::new(0.5, 0.0);
        assert_eq!(q_pochhammer(a, qq, 0), Complex64::new(1.0, 0.0));
        assert_eq!(q_pochhammer(Complex64::new(1.0, 0.0), qq, 4), Complex64::new(0.0, 0.0));
        let v = q_pochhammer(a, qq, 3);
        assert!((v - Complex64::new(0.5 * 0.75 * 0.875, 0.0)).norm() < 1e-16);
        assert!((v.re - 0.328125).abs() < 1e-16);
    }

    #[test]
    fn gauss_expansion_of_pochhammer() {
        let eps = f64::EPSILON;
        for &qv in &[0.3, 0.5] {
            let qq = q(qv);
            for &a in &[
                Complex64::new(0.5, 0.0),
                Complex64::new(-0.7, 0.2),
                Complex64::new(0.1, -0.9),
            ] {
                for n in 0..=30usize {
                    let direct = q_pochhammer(a, qq, n);
                    let mut sum = Complex64::new(0.0, 0.0);
                    for k in 0..=n {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        let t = sign
                            * q_binomial(n, k, qq).unwrap()
                            * qq.pow(k * k.saturating_sub(1) / 2);
                        sum += a.powu(k as u32) * t;
                    }
                    let err = (direct - sum).norm();
                    assert!(err <= 10.0 * eps * (n.max(1) as f64), "q={qv} a={a} n={n}: {err:e}");
                }
            }
        }
    }

    #[test]
    fn infinite_pochhammer() {
        let qq = q(0.5);
        let p = q_pochhammer_infinite(Complex64::new(0.0, 0.0), qq, 1e-12).unwrap();
        assert_eq!(p.value, Complex64::new(1.0, 0.0));

        // Running partial products until they stop moving.
        let mut run = 1.0_f64;
        let mut k = 0;
        loop {
            let next = run * (1.0 + 0.5_f64.powi(k));
            if (next - run).abs() < 1e-15 {
                break;
            }
            run = next;
            k += 1;
        }
        let p = q_pochhammer_infinite(Complex64::new(-1.0, 0.0), qq, 1e-12).unwrap();
        assert!((p.value.re - run).abs() < 1e-12, "{} vs {run}", p.value.re);
        assert!(p.terms > 0);

        let coarse = q_pochhammer_infinite(Complex64::new(-1.0, 0.0), qq, 1e-8).unwrap();
        let fine = q_pochhammer_infinite(Complex64::new(-1.0, 0.0), qq, 1e-9).unwrap();
        assert!((coarse.value - fine.value).norm() < 1e-8);
        assert!(fine.terms >= coarse.terms);

        assert!(q_pochhammer_infinite(Complex64::new(0.3, 0.0), qq, 0.0).is_err());
        assert!(q_pochhammer_infinite(Complex64::new(0.3, 0.0), qq, -1.0).is_err());
    }

    #[test]
    fn table_matches_free_functions() {
        let qq = q(0.7);
        let t = QArithmetic::new(qq, 40);
        assert_eq!(t.max_n(), 40);
        assert_eq!(t.integer(0).unwrap(), 0.0);
        assert_eq!(t.factorial(0).unwrap(), 1.0);
        for n in 1..=40 {
            assert!(close(t.integer(n).unwrap(), q_integer(n, qq), 1e-15));
            assert!(close(t.factorial(n).unwrap(), q_factorial(n, qq).unwrap(), 1e-13));
            assert!(t.integer(n).unwrap() > t.integer(n - 1).unwrap());
            assert!(t.integer(n).unwrap() < 1.0 / (1.0 - 0.7));
            for k in 0..=n {
                assert!(close(t.binomial(n, k).unwrap(), q_binomial(n, k, qq).unwrap(), 1e-13));
            }
        }
        assert!(matches!(t.factorial(41), Err(Error::Capacity { index: 41, capacity: 40 })));
        assert!(matches!(t.binomial(41, 2), Err(Error::Capacity { .. })));
    }

    #[test]
    fn factorial_overflow_near_one() {
        let qq = q(1.0 - 1e-6);
        assert!(matches!(q_factorial(200, qq), Err(Error::Overflow(_))));
        let t = QArithmetic::with_default_capacity(qq);
        assert!(matches!(t.factorial(200), Err(Error::Overflow(_))));
        assert!(t.binomial(200, 100).unwrap().is_finite());
    }
}
