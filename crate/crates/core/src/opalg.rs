//! Operator layer: the Duhamel operators `D_f g = f *_q g` and the
//! q-integration operator `V_q = D_z` as lower-triangular matrices in the
//! monomial basis, with triangular solves, commutant reconstruction,
//! cyclicity and the weight structure of `V_q`.

use std::ops::{Mul, Sub};

use log::warn;
use num_complex::Complex64;
use serde::Serialize;

use crate::duhamel::{duhamel_product, DuhamelTable};
use crate::error::{Error, Result};
use crate::qnum::{q_factorial, q_integer, QParam};
use crate::qops::jackson_integral_coeff;
use crate::series::{nan_max, TruncatedSeries};

/// Matrix of an operator on series of order `N`: entry `(i, j)` is the
/// coefficient of `z^i` in the image of `z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    order: usize,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(order: usize) -> Self {
        let dim = order + 1;
        Self { order, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let dim = order + 1;
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { order, entries }
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("operator matrix rows must form a nonempty square".into()));
        }
        Ok(Self { order: dim - 1, entries: rows.into_iter().flatten().collect() })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.order + 1
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks(self.dim())
    }

    /// Image of `z^j`.
    pub fn column(&self, j: usize) -> TruncatedSeries {
        TruncatedSeries::from_fn(self.order, |i| self.get(i, j))
    }

    /// Applies the matrix to `g`, re-truncated to the matrix order.
    pub fn apply(&self, g: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::from_fn(self.order, |i| {
            (0..self.dim()).map(|j| self.get(i, j) * g.coeff(j)).sum()
        })
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.dim()).all(|i| (i + 1..self.dim()).all(|j| self.get(i, j) == Complex64::new(0.0, 0.0)))
    }

    /// Max-absolute-entry norm.
    pub fn max_abs(&self) -> f64 {
        self.max_abs_leading(self.dim())
    }

    /// Max-absolute-entry norm over the leading `size x size` block.
    pub fn max_abs_leading(&self, size: usize) -> f64 {
        let size = size.min(self.dim());
        let mut m = 0.0_f64;
        for i in 0..size {
            for j in 0..size {
                m = nan_max(m, self.get(i, j).norm());
            }
        }
        m
    }

    /// Operator norm induced by the Wiener norm: the largest column 1-norm.
    pub fn wiener_operator_norm(&self) -> f64 {
        (0..self.dim())
            .map(|j| (0..self.dim()).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, nan_max)
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.dim();
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .expect("nonempty range");
            if a[pivot * n + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let factor = a[row * n + col] / p;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= factor * v;
                }
            }
        }
        det
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.order, rhs.order, "order mismatch");
        let n = self.dim();
        OperatorMatrix::from_fn(self.order, |i, j| (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum())
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.order, rhs.order, "order mismatch");
        OperatorMatrix {
            order: self.order,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `D_f` at order `n`: entry `(k + m, m) = a_k w(k, m)`.
pub fn duhamel_operator_matrix(f: &TruncatedSeries, q: QParam, n: usize) -> OperatorMatrix {
    duhamel_operator_matrix_with(&DuhamelTable::new(q, n), f, n)
}

/// As [`duhamel_operator_matrix`] with precomputed structure constants.
/// Panics if `n` exceeds the table order.
pub fn duhamel_operator_matrix_with(table: &DuhamelTable, f: &TruncatedSeries, n: usize) -> OperatorMatrix {
    assert!(n <= table.order(), "table order {} below matrix order {n}", table.order());
    OperatorMatrix::from_fn(n, |i, j| {
        if i < j {
            Complex64::new(0.0, 0.0)
        } else {
            f.coeff(i - j) * table.weight(i - j, j)
        }
    })
}

/// `V_q` at order `n`: the weighted shift `z^m -> z^(m+1) / [m+1]_q`.
pub fn vq_matrix(q: QParam, n: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(n, |i, j| {
        if i == j + 1 {
            Complex64::new(1.0 / q_integer(i, q), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Lambda_q f(z) = f(qz)`: the diagonal matrix `diag(q^n)`.
pub fn lambda_q_matrix(q: QParam, n: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(q.pow(i), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Largest coefficient deviation between `V_q^n f` (by `n` Jackson
/// integrations) and `z^n *_q f / [n]_q!`.
pub fn vq_power_identity_residual(f: &TruncatedSeries, n: usize, q: QParam) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("V_q power identity needs n >= 1".into()));
    }
    let out_order = f.order() + n;
    let iterated = (0..n).fold(f.clone(), |acc, _| jackson_integral_coeff(&acc, q));
    let fact = q_factorial(n, q)?;
    let via_product = duhamel_product(&TruncatedSeries::monomial(n, n), f, q, out_order)
        .scale(Complex64::new(1.0 / fact, 0.0));
    Ok(iterated.max_abs_diff(&via_product))
}

/// `1e-12 * max(1, ||f||_w)`.
pub fn default_sing_tol(f: &TruncatedSeries) -> f64 {
    1e-12 * f.wiener_norm().max(1.0)
}

/// `|f(0)|` below this fraction of `||f||_w` triggers a conditioning warning.
const NEAR_SINGULAR_RATIO: f64 = 1e-6;

/// Solves `f *_q g = h` at order `n` by forward substitution on the
/// lower-triangular matrix of `D_f`.
pub fn duhamel_solve(
    f: &TruncatedSeries,
    h: &TruncatedSeries,
    q: QParam,
    n: usize,
    sing_tol: f64,
) -> Result<TruncatedSeries> {
    let head = f.head();
    if !(head.norm() > sing_tol) {
        return Err(Error::Singular { value: head.norm(), threshold: sing_tol });
    }
    if head.norm() < NEAR_SINGULAR_RATIO * f.wiener_norm() {
        // Pi diag^{-1} = f(0)^{-(n+1)}
        let log10_cond = -((n + 1) as f64) * head.norm().log10();
        warn!(
            "near-singular Duhamel solve: |f(0)| = {:e}, condition estimate ~ 1e{log10_cond:.1}",
            head.norm()
        );
    }
    let table = DuhamelTable::new(q, n);
    let mut g = vec![Complex64::new(0.0, 0.0); n + 1];
    for i in 0..=n {
        let mut acc = h.coeff(i);
        for (j, gj) in g.iter().enumerate().take(i).skip(i.saturating_sub(f.order())) {
            acc -= f.coeff(i - j) * table.weight(i - j, j) * gj;
        }
        g[i] = acc / head;
    }
    TruncatedSeries::from_coeffs(g)
}

/// The `*_q`-inverse of `f` at order `n`; fails when `|f(0)| <= sing_tol`.
pub fn invert_duhamel(f: &TruncatedSeries, q: QParam, n: usize, sing_tol: f64) -> Result<TruncatedSeries> {
    duhamel_solve(f, &TruncatedSeries::one(0), q, n, sing_tol)
}

/// `||f *_q g - h||_max` for the solution `g` of [`duhamel_solve`].
pub fn duhamel_solve_residual(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    h: &TruncatedSeries,
    q: QParam,
    n: usize,
) -> f64 {
    duhamel_product(f, g, q, n).max_abs_diff(&h.with_order(n))
}

/// Outcome of [`commutant_reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantFit {
    /// `f = A 1`, the first column of `A`.
    pub symbol: TruncatedSeries,
    /// `||A - D_f||_max` on the leading block.
    pub residual: f64,
    /// `||A V_q - V_q A||_max` on the leading block.
    pub commutator: f64,
}

/// Recovers `f` with `A = D_f` for an `A` commuting with `V_q`.
///
/// Truncation drops `V_q z^N`, so only the leading `N x N` block is compared.
pub fn commutant_reconstruct(a: &OperatorMatrix, q: QParam, comm_tol: f64) -> Result<CommutantFit> {
    let n = a.order();
    let block = n.max(1);
    let v = vq_matrix(q, n);
    let commutator = (&(a * &v) - &(&v * a)).max_abs_leading(block);
    if !(commutator < comm_tol) {
        return Err(Error::NotInCommutant { residual: commutator, tolerance: comm_tol });
    }
    let symbol = a.column(0);
    let residual = (a - &duhamel_operator_matrix(&symbol, q, n)).max_abs_leading(block);
    Ok(CommutantFit { symbol, residual, commutator })
}

/// Krylov-matrix diagnostics for `f` as a cyclic vector of `V_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cyclicity {
    pub cyclic: bool,
    pub sing_tol: f64,
    /// Determinant of `[f, V_q f, ..., V_q^N f]` by LU factorisation.
    pub determinant: Complex64,
    /// `f(0)^(N+1) / prod_{n<=N} [n]_q!`.
    pub closed_form: Complex64,
}

impl Cyclicity {
    /// `|det - closed| / |closed|`; zero when both vanish.
    pub fn relative_error(&self) -> f64 {
        let d = (self.determinant - self.closed_form).norm();
        if self.closed_form.norm() == 0.0 {
            d
        } else {
            d / self.closed_form.norm()
        }
    }
}

/// Builds the Krylov matrix of `f` under `V_q` at order `n` and reports
/// whether it is nonsingular, which on truncations happens iff `f(0) != 0`.
pub fn cyclicity_check(f: &TruncatedSeries, q: QParam, n: usize) -> Cyclicity {
    let sing_tol = default_sing_tol(f);
    let mut columns = Vec::with_capacity(n + 1);
    let mut v = f.with_order(n);
    for _ in 0..=n {
        columns.push(v.clone());
        v = jackson_integral_coeff(&v, q).with_order(n);
    }
    let krylov = OperatorMatrix::from_fn(n, |i, j| columns[j].coeff(i));
    let determinant = krylov.determinant();

    let mut closed_form = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for k in 0..=n {
        if k > 0 {
            fact *= q_integer(k, q);
        }
        closed_form *= f.head() / fact;
    }
    Cyclicity { cyclic: f.head().norm() > sing_tol, sing_tol, determinant, closed_form }
}

/// Weight structure of `V_q = (1 - q) S + K`, with `S` the unweighted shift
/// and `K` the weighted shift with weights `(1 - q) q^(n+1) / (1 - q^(n+1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub q: f64,
    pub order: usize,
    /// `1 / [n+1]_q` for `n <= order`.
    pub vq_weights: Vec<f64>,
    /// `1 - q`, the limit of the `V_q` weights.
    pub weight_limit: f64,
    /// Weights of `K` for `n <= order`.
    pub remainder_weights: Vec<f64>,
    /// `sup_{n >= m} 1/[n+1]_q` for `m <= order`; the norm of the tail of `V_q`.
    pub vq_tail_norms: Vec<f64>,
    /// `sup_{n >= m}` of the `K` weights for `m <= order`.
    pub remainder_tail_norms: Vec<f64>,
    pub tol: f64,
    /// `ceil(log tol / log q)`.
    pub tail_index: usize,
    /// Largest `K` weight over `tail_index..=tail_index + order`.
    pub remainder_tail_max: f64,
    pub remainder_tail_below_tol: bool,
    pub vq_weights_at_least_limit: bool,
    pub remainder_positive_decreasing: bool,
}

impl CompactnessReport {
    pub fn holds(&self) -> bool {
        self.remainder_tail_below_tol && self.vq_weights_at_least_limit && self.remainder_positive_decreasing
    }
}

fn remainder_weight(q: f64, n: usize) -> f64 {
    let qn1 = q.powi(n as i32 + 1);
    (1.0 - q) * qn1 / (1.0 - qn1)
}

/// Reports the weight structure of `V_q`. Its weights stay above `1 - q`,
/// so the tail norms of `V_q` do not decay; those of `K` do.
pub fn compactness_diagnostics(q: QParam, n: usize, tol: f64) -> Result<CompactnessReport> {
    if n < 1 {
        return Err(Error::Domain("compactness diagnostics need order >= 1".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let qv = q.value();
    let vq_weights: Vec<f64> = (0..=n).map(|k| 1.0 / q_integer(k + 1, q)).collect();
    let remainder_weights: Vec<f64> = (0..=n).map(|k| remainder_weight(qv, k)).collect();
    let weight_limit = 1.0 - qv;

    // Both weight sequences are nonincreasing, so the tail sup is the first entry.
    let vq_tail_norms = vq_weights.clone();
    let remainder_tail_norms = remainder_weights.clone();

    let tail_index = (tol.ln() / qv.ln()).ceil().max(0.0) as usize;
    let remainder_tail_max = (tail_index..=tail_index + n)
        .map(|k| remainder_weight(qv, k))
        .fold(0.0, nan_max);

    let vq_weights_at_least_limit = vq_weights.iter().all(|&w| w >= weight_limit);
    let remainder_positive_decreasing = remainder_weights.iter().all(|&w| w > 0.0)
        && remainder_weights.windows(2).all(|p| p[1] < p[0]);

    Ok(CompactnessReport {
        q: qv,
        order: n,
        vq_weights,
        weight_limit,
        remainder_weights,
        vq_tail_norms,
        remainder_tail_norms,
        tol,
        tail_index,
        remainder_tail_max,
        remainder_tail_below_tol: remainder_tail_max < tol,
        vq_weights_at_least_limit,
        remainder_positive_decreasing,
    })
}
