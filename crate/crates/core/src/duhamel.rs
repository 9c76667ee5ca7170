//! The q-Duhamel product.
//!
//! On monomials `z^k *_q z^m = w(k, m) z^(k+m)` with structure constants
//! `w(k, m) = [k]_q! [m]_q! / [k+m]_q!`, so on truncated series
//! `(f *_q g)_n = sum_k a_k b_{n-k} w(k, n-k)`.
//!
//! The defining integral `D_q( int_0^z (tau_q^{-t} f)(z) g(t) d_q t )` and its
//! two rewritings are evaluated numerically by the `*_oracle`/`via_*`
//! functions; they share no code with the coefficient rule and serve as an
//! independent check of it.
//!
//! The q-Borel transform multiplies the stored coefficient of `z^n` by
//! `[n]_q!`, which turns `*_q` into the Cauchy product.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::qnum::{q_integer, QParam};
use crate::qops::{abs_bound, d_q, jackson_cutoff, jackson_sum, q_translate, JACKSON_MAX_TERMS};
use crate::series::{DiscPoint, TruncatedSeries};

/// Structure constants `w(k, m)` for `k + m <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelTable {
    q: QParam,
    order: usize,
    // row-major (order+1) x (order+1); entries with k + m > order are unused
    weights: Vec<f64>,
}

impl DuhamelTable {
    pub fn new(q: QParam, order: usize) -> Self {
        let dim = order + 1;
        let mut weights = vec![0.0; dim * dim];
        let q_int: Vec<f64> = (0..=order).map(|n| q_integer(n, q)).collect();
        for k in 0..=order {
            // w(k, 0) = 1, w(k, m) = w(k, m - 1) [m]_q / [k + m]_q
            let mut w = 1.0;
            weights[k * dim] = w;
            for m in 1..=order - k {
                w *= q_int[m] / q_int[k + m];
                weights[k * dim + m] = w;
            }
        }
        Self { q, order, weights }
    }

    #[inline]
    pub fn q(&self) -> QParam {
        self.q
    }

    /// Largest total degree `k + m` covered.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// `w(k, m)`; panics if `k + m` exceeds the table order.
    #[inline]
    pub fn weight(&self, k: usize, m: usize) -> f64 {
        assert!(k + m <= self.order, "w({k}, {m}) outside table of order {}", self.order);
        self.weights[k * (self.order + 1) + m]
    }

    /// Copy of the table with `w(k, m)` multiplied by `factor`.
    ///
    /// Only meant for negative controls: a perturbed table must make the
    /// verification suite fail.
    pub fn perturbed(mut self, k: usize, m: usize, factor: f64) -> Self {
        assert!(k + m <= self.order);
        self.weights[k * (self.order + 1) + m] *= factor;
        self
    }

    /// `f *_q g` truncated at `out_order`.
    pub fn product(
        &self,
        f: &TruncatedSeries,
        g: &TruncatedSeries,
        out_order: usize,
    ) -> Result<TruncatedSeries> {
        if out_order > self.order {
            return Err(Error::Capacity { index: out_order, capacity: self.order });
        }
        Ok(TruncatedSeries::from_fn(out_order, |n| {
            let lo = n.saturating_sub(g.order());
            let hi = n.min(f.order());
            (lo..=hi)
                .map(|k| f.coeffs()[k] * g.coeffs()[n - k] * self.weight(k, n - k))
                .sum()
        }))
    }
}

/// `f *_q g` truncated at `out_order`, by the coefficient rule.
pub fn duhamel_product(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    q: QParam,
    out_order: usize,
) -> TruncatedSeries {
    DuhamelTable::new(q, out_order)
        .product(f, g, out_order)
        .expect("table sized to out_order")
}

/// Bound for `|(tau_q^{-t} f)(x)|` over `|t| <= |x|`: translate `|f|` by `|x|`
/// and evaluate at `|x|`.
fn translated_bound(f: &TruncatedSeries, r: f64, q: QParam) -> f64 {
    let abs_f = TruncatedSeries::from_fn(f.order(), |n| Complex64::new(f.coeff(n).norm(), 0.0));
    q_translate(&abs_f, Complex64::new(r, 0.0), q).polynomial_value(Complex64::new(r, 0.0)).re
}

/// Numeric evaluation of `f *_q g` from its integral forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralOracle {
    pub q: QParam,
    /// Target error of each evaluation.
    pub tol: f64,
    /// Ceiling on the number of Jackson-sum terms.
    pub max_terms: usize,
}

impl IntegralOracle {
    pub fn new(q: QParam, tol: f64) -> Result<Self> {
        Self::with_max_terms(q, tol, JACKSON_MAX_TERMS)
    }

    pub fn with_max_terms(q: QParam, tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(domain(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { q, tol, max_terms })
    }

    /// `int_0^x (tau_q^{-t} f)(x) g(t) d_q t`, summed until the tail is below `tol`.
    fn translated_integral(&self, f: &TruncatedSeries, g: &TruncatedSeries, x: Complex64, tol: f64) -> Complex64 {
        let q = self.q;
        let r = x.norm();
        let scale = translated_bound(f, r, q) * abs_bound(g, r);
        let terms = jackson_cutoff(tol, scale, q, self.max_terms);
        jackson_sum(|t| q_translate(f, -t, q).polynomial_value(x) * g.polynomial_value(t), x, q, terms)
    }

    /// With `H(x) = int_0^x (tau_q^{-t} f)(x) g(t) d_q t`, returns
    /// `(H(z) - H(qz)) / ((1 - q) z)`; at `z = 0` returns `f(0) g(0)`.
    pub fn definition(&self, f: &TruncatedSeries, g: &TruncatedSeries, p: DiscPoint) -> Complex64 {
        let z = p.value();
        if z.norm() == 0.0 {
            return f.head() * g.head();
        }
        let qv = self.q.value();
        // The difference quotient divides the Jackson-sum error by (1 - q)|z|,
        // and each sum carries a factor |x|, so the inner budget is tol (1 - q).
        let inner = self.tol * (1.0 - qv);
        let h_z = self.translated_integral(f, g, z, inner);
        let h_qz = self.translated_integral(f, g, z * qv, inner);
        (h_z - h_qz) / (z * (1.0 - qv))
    }

    /// `int_0^z (tau_q^{-t} D_q f)(z) g(t) d_q t + f(0) g(z)`.
    pub fn ra1(&self, f: &TruncatedSeries, g: &TruncatedSeries, p: DiscPoint) -> Complex64 {
        let z = p.value();
        self.translated_integral(&d_q(f, self.q), g, z, self.tol) + f.head() * g.polynomial_value(z)
    }

    /// `int_0^z (tau_q^{-t} f)(z) (D_q g)(t) d_q t + f(z) g(0)`.
    pub fn ra2(&self, f: &TruncatedSeries, g: &TruncatedSeries, p: DiscPoint) -> Complex64 {
        let z = p.value();
        self.translated_integral(f, &d_q(g, self.q), z, self.tol) + f.polynomial_value(z) * g.head()
    }
}

/// `(f *_q g)(z)` from the integral definition
/// `D_q( int_0^z (tau_q^{-t} f)(z) g(t) d_q t )`.
pub fn duhamel_integral_oracle(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    q: QParam,
    p: DiscPoint,
    tol: f64,
) -> Result<Complex64> {
    Ok(IntegralOracle::new(q, tol)?.definition(f, g, p))
}

/// `(f *_q g)(z) = int_0^z (tau_q^{-t} D_q f)(z) g(t) d_q t + f(0) g(z)`.
pub fn duhamel_via_ra1(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    q: QParam,
    p: DiscPoint,
    tol: f64,
) -> Result<Complex64> {
    Ok(IntegralOracle::new(q, tol)?.ra1(f, g, p))
}

/// `(f *_q g)(z) = int_0^z (tau_q^{-t} f)(z) (D_q g)(t) d_q t + f(z) g(0)`.
pub fn duhamel_via_ra2(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    q: QParam,
    p: DiscPoint,
    tol: f64,
) -> Result<Complex64> {
    Ok(IntegralOracle::new(q, tol)?.ra2(f, g, p))
}

/// q-Borel transform on stored coefficients: `a_n -> [n]_q! a_n`.
pub fn borel_transform(f: &TruncatedSeries, q: QParam) -> TruncatedSeries {
    let mut fact = 1.0;
    TruncatedSeries::from_fn(f.order(), |n| {
        if n > 0 {
            fact *= q_integer(n, q);
        }
        f.coeff(n) * fact
    })
}

/// Inverse q-Borel transform: `a_n -> a_n / [n]_q!`.
pub fn inverse_borel(f: &TruncatedSeries, q: QParam) -> TruncatedSeries {
    let mut fact = 1.0;
    TruncatedSeries::from_fn(f.order(), |n| {
        if n > 0 {
            fact *= q_integer(n, q);
        }
        f.coeff(n) / fact
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::q_factorial;
    use crate::sample::Sampler;
    use crate::series::cauchy_product;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn table_properties() {
        for &qv in &[0.1, 0.5, 0.9, 0.999] {
            let t = DuhamelTable::new(q(qv), 24);
            for k in 0..=24 {
                assert_eq!(t.weight(k, 0), 1.0);
                assert_eq!(t.weight(0, k), 1.0);
                for m in 0..=24 - k {
                    let w = t.weight(k, m);
                    assert!(w > 0.0 && w <= 1.0);
                    assert!((w - t.weight(m, k)).abs() <= 1e-15 * w);
                    let by_fact = q_factorial(k, q(qv)).unwrap() * q_factorial(m, q(qv)).unwrap()
                        / q_factorial(k + m, q(qv)).unwrap();
                    assert!((w - by_fact).abs() <= 1e-12 * w);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let qq = q(0.5);
        let mut s = Sampler::new(3);
        let f = s.series(6);
        assert_eq!(duhamel_product(&f, &TruncatedSeries::one(0), qq, 6), f);
        assert_eq!(duhamel_product(&TruncatedSeries::one(0), &f, qq, 6), f);

        let z = TruncatedSeries::monomial(1, 1);
        let zz = duhamel_product(&z, &z, qq, 2);
        assert!((zz.coeff(2).re - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(zz.coeff(0), c(0.0, 0.0));
        assert_eq!(zz.coeff(1), c(0.0, 0.0));

        let qv = 0.37;
        let p = duhamel_product(&TruncatedSeries::monomial(2, 2), &TruncatedSeries::monomial(3, 3), q(qv), 5);
        let expect = q_factorial(2, q(qv)).unwrap() * q_factorial(3, q(qv)).unwrap()
            / q_factorial(5, q(qv)).unwrap();
        assert!((p.coeff(5).re - expect).abs() < 1e-15);
    }

    #[test]
    fn table_capacity() {
        let t = DuhamelTable::new(q(0.5), 4);
        let f = TruncatedSeries::one(2);
        assert!(matches!(t.product(&f, &f, 5), Err(Error::Capacity { index: 5, capacity: 4 })));
        assert!(t.product(&f, &f, 4).is_ok());
    }

    #[test]
    fn algebra_axioms() {
        let mut s = Sampler::new(11);
        for &qv in &[0.3, 0.5, 0.9] {
            let qq = q(qv);
            for _ in 0..20 {
                let (f, g, h) = (s.series(8), s.series(8), s.series(8));
                let fg = duhamel_product(&f, &g, qq, 16);
                let gf = duhamel_product(&g, &f, qq, 16);
                assert!(fg.max_abs_diff(&gf) < 1e-15);

                let left = duhamel_product(&fg, &h, qq, 16);
                let right = duhamel_product(&f, &duhamel_product(&g, &h, qq, 16), qq, 16);
                assert!(left.max_abs_diff(&right) < 1e-12);

                assert!(fg.wiener_norm() <= f.wiener_norm() * g.wiener_norm());
            }
        }
    }

    #[test]
    fn borel_examples() {
        let qq = q(0.5);
        let k = TruncatedSeries::constant(c(2.0, -1.0), 0);
        assert_eq!(borel_transform(&k, qq), k);
        assert_eq!(inverse_borel(&k, qq), k);
        let b = borel_transform(&TruncatedSeries::monomial(2, 2), qq);
        assert!((b.coeff(2).re - 1.5).abs() < 1e-15);
        let mut s = Sampler::new(5);
        let f = s.series(12);
        assert!(inverse_borel(&borel_transform(&f, qq), qq).max_abs_diff(&f) < 1e-15);
        assert!(borel_transform(&inverse_borel(&f, qq), qq).max_abs_diff(&f) < 1e-15);
        let fact5 = q_factorial(5, qq).unwrap();
        let scaled = TruncatedSeries::monomial(5, 5).scale(c(fact5, 0.0));
        assert!(inverse_borel(&scaled, qq).max_abs_diff(&TruncatedSeries::monomial(5, 5)) < 1e-15);
    }

    #[test]
    fn borel_homomorphism() {
        let mut s = Sampler::new(21);
        for &qv in &[0.3, 0.5, 0.9] {
            let qq = q(qv);
            let (f, g) = (s.series(16), s.series(16));
            let lhs = borel_transform(&duhamel_product(&f, &g, qq, 16), qq);
            let rhs = cauchy_product(&borel_transform(&f, qq), &borel_transform(&g, qq), 16);
            assert!(lhs.approx_eq(&rhs, 1e-12, 1e-12));
        }
    }

    #[test]
    fn integral_oracle_examples() {
        let qq = q(0.5);
        let one = TruncatedSeries::one(0);
        let p = DiscPoint::new(c(0.3, 0.2)).unwrap();
        let v = duhamel_integral_oracle(&one, &one, qq, p, 1e-12).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);

        let z = TruncatedSeries::monomial(1, 1);
        let v = duhamel_integral_oracle(&z, &z, qq, DiscPoint::real(0.3).unwrap(), 1e-12).unwrap();
        assert!((v - c(0.06, 0.0)).norm() < 1e-12, "{v}");

        let zero = DiscPoint::real(0.0).unwrap();
        let f = TruncatedSeries::from_real(&[0.5, 1.0]).unwrap();
        assert_eq!(duhamel_integral_oracle(&f, &f, qq, zero, 1e-12).unwrap(), c(0.25, 0.0));
        assert!(duhamel_integral_oracle(&f, &f, qq, p, 0.0).is_err());
    }

    #[test]
    fn integral_oracle_matches_coefficient_rule() {
        let mut s = Sampler::new(99);
        for &qv in &[0.2, 0.5, 0.9] {
            let qq = q(qv);
            let (f, g) = (s.series(4), s.series(4));
            let fg = duhamel_product(&f, &g, qq, 8);
            for _ in 0..10 {
                let p = s.disc_point(0.5);
                let oracle = duhamel_integral_oracle(&f, &g, qq, p, 1e-12).unwrap();
                let ra1 = duhamel_via_ra1(&f, &g, qq, p, 1e-13).unwrap();
                let ra2 = duhamel_via_ra2(&f, &g, qq, p, 1e-13).unwrap();
                let exact = fg.evaluate(p);
                assert!((oracle - exact).norm() < 1e-8, "q={qv}");
                assert!((ra1 - oracle).norm() < 1e-8);
                assert!((ra2 - oracle).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn rewritings_with_constants() {
        let qq = q(0.6);
        let mut s = Sampler::new(4);
        let g = s.series(5);
        let k = TruncatedSeries::constant(c(0.7, -0.3), 0);
        let p = DiscPoint::new(c(0.25, -0.35)).unwrap();
        let ra1 = duhamel_via_ra1(&k, &g, qq, p, 1e-13).unwrap();
        assert!((ra1 - k.head() * g.evaluate(p)).norm() < 1e-15);
        let ra2 = duhamel_via_ra2(&g, &k, qq, p, 1e-13).unwrap();
        assert!((ra2 - g.evaluate(p) * k.head()).norm() < 1e-15);
    }

    #[test]
    fn classical_limit() {
        let t = DuhamelTable::new(q(1.0 - 1e-4), 10);
        let fact = |n: usize| (1..=n).map(|j| j as f64).product::<f64>();
        for k in 0..=10 {
            for m in 0..=10 - k {
                let classical = fact(k) * fact(m) / fact(k + m);
                assert!((t.weight(k, m) - classical).abs() < 1e-2 * classical);
            }
        }
    }
}
