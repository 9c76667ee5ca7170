//! q-operators acting on truncated series: backward and forward
//! q-derivatives, the Jackson q-integral (coefficient rule and numeric sum),
//! q-translation, the two q-exponentials and the q-integration-by-parts
//! residual.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::qnum::{q_integer, QParam};
use crate::series::{DiscPoint, TruncatedSeries};

/// Smallest number of terms a Jackson sum ever uses.
pub const JACKSON_MIN_TERMS: usize = 8;
/// Default largest number of terms a Jackson sum may use.
pub const JACKSON_MAX_TERMS: usize = 10_000;

/// Backward q-derivative `(f(z) - f(qz)) / ((1 - q) z)`.
///
/// Coefficient rule `(D_q f)_n = [n+1]_q a_{n+1}`; the order drops by one
/// (a constant maps to the zero series of order 0).
pub fn d_q(f: &TruncatedSeries, q: QParam) -> TruncatedSeries {
    let order = f.order().saturating_sub(1);
    TruncatedSeries::from_fn(order, |n| f.coeff(n + 1) * q_integer(n + 1, q))
}

/// Forward q-derivative `(f(z/q) - f(z)) / ((1 - q) z)`.
///
/// Coefficient rule `(D_q^+ f)_n = q^{-(n+1)} [n+1]_q a_{n+1}`.
pub fn d_q_plus(f: &TruncatedSeries, q: QParam) -> TruncatedSeries {
    let order = f.order().saturating_sub(1);
    TruncatedSeries::from_fn(order, |n| {
        f.coeff(n + 1) * (q_integer(n + 1, q) / q.pow(n + 1))
    })
}

/// Jackson integral `V_q f = int_0^z f(t) d_q t` by its coefficient rule
/// `(V_q f)_{n+1} = a_n / [n+1]_q`. The order rises by one.
pub fn jackson_integral_coeff(f: &TruncatedSeries, q: QParam) -> TruncatedSeries {
    TruncatedSeries::from_fn(f.order() + 1, |n| {
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            f.coeff(n - 1) / q_integer(n, q)
        }
    })
}

/// Number of terms for a Jackson sum whose integrand is bounded by `scale`:
/// `ceil(log(tol / max(1, scale)) / log q)`, clamped to `[8, max_terms]`.
pub fn jackson_cutoff(tol: f64, scale: f64, q: QParam, max_terms: usize) -> usize {
    let k = ((tol / scale.max(1.0)).ln() / q.value().ln()).ceil();
    let k = if k.is_finite() && k > 0.0 { k as usize } else { 0 };
    k.clamp(JACKSON_MIN_TERMS, max_terms.max(JACKSON_MIN_TERMS))
}

/// Truncated Jackson sum `z (1 - q) sum_{n<terms} h(z q^n) q^n`.
pub fn jackson_sum<F>(integrand: F, z: Complex64, q: QParam, terms: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let qv = q.value();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = 1.0;
    for _ in 0..terms {
        acc += integrand(z * qn) * qn;
        qn *= qv;
    }
    acc * z * (1.0 - qv)
}

/// `sum |a_n| r^n`, a bound for `|f|` on the closed disc of radius `r`.
pub fn abs_bound(f: &TruncatedSeries, r: f64) -> f64 {
    f.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Jackson integral of `f` from 0 to `z`, summed numerically.
pub fn jackson_integral_numeric(
    f: &TruncatedSeries,
    q: QParam,
    p: DiscPoint,
    tol: f64,
) -> Result<Complex64> {
    jackson_integral_numeric_with(f, q, p, tol, JACKSON_MAX_TERMS)
}

/// As [`jackson_integral_numeric`] with an explicit ceiling on the number of terms.
pub fn jackson_integral_numeric_with(
    f: &TruncatedSeries,
    q: QParam,
    p: DiscPoint,
    tol: f64,
    max_terms: usize,
) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let terms = jackson_cutoff(tol, f.wiener_norm(), q, max_terms);
    Ok(jackson_sum(|t| f.polynomial_value(t), p.value(), q, terms))
}

/// q-translation `tau_q^xi f`, with monomial images
/// `tau_q^xi z^n = sum_k [n choose k]_q q^{k(k+1)/2} xi^k z^{n-k}`,
/// extended linearly. The result keeps the order of `f`.
pub fn q_translate(f: &TruncatedSeries, xi: Complex64, q: QParam) -> TruncatedSeries {
    let n_max = f.order();
    let qv = q.value();
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];

    // weight[k] = q^{k(k+1)/2} xi^k
    let mut weight = Vec::with_capacity(n_max + 1);
    let mut w = Complex64::new(1.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..=n_max {
        weight.push(w);
        qk *= qv;
        w *= xi * qk;
    }

    // Gaussian binomial rows via [n,k] = [n-1,k-1] + q^k [n-1,k].
    let mut row = vec![1.0_f64];
    for (n, &a) in f.coeffs().iter().enumerate() {
        if n > 0 {
            let mut next = vec![1.0; n + 1];
            let mut qk = 1.0;
            for k in 1..n {
                qk *= qv;
                next[k] = row[k - 1] + qk * row[k];
            }
            row = next;
        }
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..=n {
            out[n - k] += a * row[k] * weight[k];
        }
    }
    TruncatedSeries::from_coeffs(out).expect("nonempty")
}

/// `e_q(z) = sum z^n / (q;q)_n`, truncated at `order`.
pub fn e_q_series(order: usize, q: QParam) -> TruncatedSeries {
    let mut poch = 1.0;
    TruncatedSeries::from_fn(order, |n| {
        if n > 0 {
            poch *= 1.0 - q.pow(n);
        }
        Complex64::new(1.0 / poch, 0.0)
    })
}

/// `E_q(z) = sum q^{n(n-1)/2} z^n / (q;q)_n`, truncated at `order`.
pub fn big_e_q_series(order: usize, q: QParam) -> TruncatedSeries {
    let mut poch = 1.0;
    TruncatedSeries::from_fn(order, |n| {
        if n > 0 {
            poch *= 1.0 - q.pow(n);
        }
        Complex64::new(q.pow(n * n.saturating_sub(1) / 2) / poch, 0.0)
    })
}

/// Tolerance used for the Jackson sums inside the identity residuals.
const RESIDUAL_JACKSON_TOL: f64 = 1e-16;

/// Residual of the q-integration-by-parts formula at `z`:
///
/// `| int_0^z (D_q f) g d_q t - [ f(z) g(z/q) - f(0) g(0) - int_0^z f (D_q^+ g) d_q t ] |`.
///
/// Requires `|z| < q` so that `z/q` stays inside the disc.
pub fn integration_by_parts_residual(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    q: QParam,
    p: DiscPoint,
) -> Result<f64> {
    let z = p.value();
    let qv = q.value();
    if z.norm() >= qv {
        return Err(domain(format!(
            "integration by parts needs |z| < q, got |z| = {} with q = {qv}",
            z.norm()
        )));
    }
    let r = z.norm();
    let df = d_q(f, q);
    let dpg = d_q_plus(g, q);

    let lhs_terms = jackson_cutoff(RESIDUAL_JACKSON_TOL, abs_bound(&df, r) * abs_bound(g, r), q, JACKSON_MAX_TERMS);
    let lhs = jackson_sum(|t| df.polynomial_value(t) * g.polynomial_value(t), z, q, lhs_terms);

    let rhs_terms = jackson_cutoff(RESIDUAL_JACKSON_TOL, abs_bound(f, r) * abs_bound(&dpg, r), q, JACKSON_MAX_TERMS);
    let rhs_int = jackson_sum(|t| f.polynomial_value(t) * dpg.polynomial_value(t), z, q, rhs_terms);
    let boundary = f.polynomial_value(z) * g.polynomial_value(z / qv) - f.head() * g.head();

    Ok((lhs - (boundary - rhs_int)).norm())
}

/// Residual of the intertwining relation `tau^xi D_q f = D^+_{q,xi} tau^xi f`
/// at the point `z`, with the forward q-derivative in `xi` taken as the exact
/// difference quotient `(T(xi/q) - T(xi)) / ((1 - q) xi)`. Needs `xi != 0`.
pub fn translation_intertwining_residual(
    f: &TruncatedSeries,
    xi: Complex64,
    z: Complex64,
    q: QParam,
) -> Result<f64> {
    if xi.norm() == 0.0 {
        return Err(domain("the intertwining check needs xi != 0"));
    }
    let qv = q.value();
    let lhs = q_translate(&d_q(f, q), xi, q).polynomial_value(z);
    let t = |x: Complex64| q_translate(f, x, q).polynomial_value(z);
    let rhs = (t(xi / qv) - t(xi)) / (xi * (1.0 - qv));
    Ok((lhs - rhs).norm())
}
