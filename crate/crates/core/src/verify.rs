//! Identity-verification suite run over a grid of `q` values.
//!
//! Each check draws its random inputs from its own seeded [`Sampler`], so a
//! report depends only on the configuration, never on execution order.

use std::thread;

use num_complex::Complex64;
use serde::Serialize;

use crate::duhamel::{borel_transform, DuhamelTable, IntegralOracle};
use crate::error::{domain, Error, Result};
use crate::opalg::{
    commutant_reconstruct, compactness_diagnostics, cyclicity_check, default_sing_tol,
    duhamel_operator_matrix_with, invert_duhamel, vq_matrix,
};
use crate::qnum::{q_binomial, q_factorial, q_pochhammer_infinite, QParam};
use crate::qops::{
    integration_by_parts_residual, jackson_integral_coeff, q_translate,
    translation_intertwining_residual, JACKSON_MAX_TERMS,
};
use crate::sample::Sampler;
use crate::series::{cauchy_product, nan_max, TruncatedSeries};

pub const DEFAULT_Q_GRID: [f64; 3] = [0.3, 0.5, 0.9];
pub const DEFAULT_ORDER: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 20_240_917;

/// `q` at which the classical-limit check runs.
pub const CLASSICAL_LIMIT_Q: f64 = 1.0 - 1e-4;

/// Run-wide settings shared by the CLI commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalConfig {
    pub q_grid: Vec<QParam>,
    pub order: usize,
    /// Truncation tolerance for oracle Jackson sums and round-trip checks.
    pub tol: f64,
    pub jackson_cutoff_max: usize,
    pub seed: u64,
    /// Negative control: perturb one structure constant before running.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub corrupt_weights: bool,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            q_grid: DEFAULT_Q_GRID.iter().map(|&q| QParam::new(q).expect("in band")).collect(),
            order: DEFAULT_ORDER,
            tol: DEFAULT_TOL,
            jackson_cutoff_max: JACKSON_MAX_TERMS,
            seed: DEFAULT_SEED,
            corrupt_weights: false,
        }
    }
}

impl GlobalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(domain("the q grid is empty"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(domain(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.jackson_cutoff_max < 8 {
            return Err(domain("jackson_cutoff_max must be at least 8"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn measured(name: &str, max_error: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name: name.to_string(),
            status: Status::from_bool(max_error <= tolerance),
            max_error,
            tolerance,
            samples,
            detail: None,
        }
    }

    fn with_failure(mut self, failure: Option<String>) -> Self {
        if failure.is_some() {
            self.status = Status::Fail;
            self.detail = failure;
        }
        self
    }

    fn errored(name: &str, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Fail,
            max_error: 0.0,
            tolerance,
            samples: 0,
            detail: Some(err.to_string()),
        }
    }
}

/// Results for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub q: f64,
    pub order: usize,
    pub checks: Vec<CheckResult>,
    pub summary: Status,
}

/// Results for the whole grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub order: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub corrupt_weights: bool,
    pub reports: Vec<VerificationReport>,
    pub summary: Status,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary == Status::Pass
    }
}

// Sample counts and tolerances for each check.
const MONOMIAL_MAX_DEGREE: usize = 8;
const MONOMIAL_POINTS: usize = 10;
const MONOMIAL_RADIUS: f64 = 0.5;
const ORACLE_TOL: f64 = 1e-8;
const AXIOM_TRIALS: usize = 100;
const COMMUTATIVITY_TOL: f64 = 1e-13;
const UNIT_TOL: f64 = 1e-13;
const ASSOCIATIVITY_TOL: f64 = 1e-12;
const TRANSLATION_TRIALS: usize = 50;
const TRANSLATION_MAX_XI: f64 = 2.0;
const INTERTWINING_SAMPLES: usize = 20;
const INTERTWINING_TOL: f64 = 1e-8;
const IBP_SAMPLES: usize = 20;
const IBP_DEGREE: usize = 5;
const IBP_TOL: f64 = 1e-8;
const BOREL_TRIALS: usize = 20;
const BOREL_TOL: f64 = 1e-12;
const VQ_POWER_TRIALS: usize = 10;
const VQ_POWER_DEGREE: usize = 8;
const VQ_POWER_MAX_N: usize = 5;
const VQ_POWER_TOL: f64 = 1e-12;
const INVERT_TRIALS: usize = 50;
const INVERT_MIN_HEAD: f64 = 0.1;
const SINGULAR_TRIALS: usize = 10;
const ROUND_TRIP_TOL: f64 = 1e-10;
const COMMUTANT_TRIALS: usize = 20;
const COMMUTANT_TOL: f64 = 1e-12;
const CYCLICITY_TRIALS: usize = 50;
const DETERMINANT_TOL: f64 = 1e-10;
const COMPACTNESS_TOL: f64 = 1e-10;
const CLASSICAL_MAX_DEGREE: usize = 10;
const CLASSICAL_TOL: f64 = 1e-2;
const WEIGHT_TOL: f64 = 1e-13;
const QNUM_MAX_N: usize = 30;
const QNUM_TOL: f64 = 1e-12;
/// Largest degree reached by the fixed-size checks.
const MIN_TABLE_ORDER: usize = 2 * MONOMIAL_MAX_DEGREE;

/// Everything a check needs for one grid point.
struct Context<'a> {
    q: QParam,
    order: usize,
    /// Structure constants up to total degree `max(2 * order, MIN_TABLE_ORDER)`.
    table: DuhamelTable,
    config: &'a GlobalConfig,
}

impl Context<'_> {
    fn sampler(&self, check: u64) -> Sampler {
        Sampler::new(self.config.seed ^ check.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn oracle(&self) -> Result<IntegralOracle> {
        IntegralOracle::with_max_terms(self.q, self.config.tol, self.config.jackson_cutoff_max)
    }

    fn product(&self, f: &TruncatedSeries, g: &TruncatedSeries, out_order: usize) -> TruncatedSeries {
        self.table.product(f, g, out_order).expect("table covers 2N")
    }
}

type Check = fn(&Context) -> CheckResult;

const CHECKS: &[(&str, Check)] = &[
    ("algebra_associativity", check_associativity),
    ("algebra_commutativity", check_commutativity),
    ("algebra_unit", check_unit),
    ("borel_homomorphism", check_borel),
    ("classical_limit", check_classical_limit),
    ("commutant_reconstruction", check_commutant),
    ("compactness_diagnostics", check_compactness),
    ("cyclicity", check_cyclicity),
    ("integration_by_parts", check_integration_by_parts),
    ("invertibility_dichotomy", check_invertibility),
    ("monomial_rule_vs_integral_oracle", check_monomial_rule),
    ("norm_submultiplicativity", check_norm),
    ("operator_homomorphism", check_operator_homomorphism),
    ("q_binomial_identities", check_qnum),
    ("rewritings_ra1_ra2", check_rewritings),
    ("translation_intertwining", check_intertwining),
    ("translation_norm_bound", check_translation_bound),
    ("vq_power_identity", check_vq_power),
    ("weight_table", check_weight_table),
];

/// Names of every check, in report order.
pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(name, _)| *name)
}

/// Runs every check at one grid point.
pub fn verify_at(q: QParam, config: &GlobalConfig) -> VerificationReport {
    let order = config.order;
    let mut table = DuhamelTable::new(q, (2 * order).max(MIN_TABLE_ORDER));
    if config.corrupt_weights {
        table = table.perturbed(1, 1, 1.5);
    }
    let ctx = Context { q, order, table, config };
    let checks: Vec<CheckResult> = CHECKS.iter().map(|(_, check)| check(&ctx)).collect();
    let summary = Status::from_bool(checks.iter().all(|c| c.status == Status::Pass));
    VerificationReport { q: q.value(), order, checks, summary }
}

/// Runs the suite at every grid point, concurrently, and assembles the
/// report ordered by `q`.
pub fn run_suite(config: &GlobalConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut reports: Vec<VerificationReport> = thread::scope(|s| {
        let handles: Vec<_> = config
            .q_grid
            .iter()
            .map(|&q| s.spawn(move || verify_at(q, config)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    });
    reports.sort_by(|a, b| a.q.total_cmp(&b.q));
    let summary = Status::from_bool(reports.iter().all(|r| r.summary == Status::Pass));
    Ok(SuiteReport {
        seed: config.seed,
        order: config.order,
        tol: config.tol,
        corrupt_weights: config.corrupt_weights,
        reports,
        summary,
    })
}

fn check_weight_table(ctx: &Context) -> CheckResult {
    let n = ctx.table.order();
    let mut err = 0.0_f64;
    let mut failure = None;
    for k in 0..=n {
        for m in 0..=n - k {
            let w = ctx.table.weight(k, m);
            if !(w > 0.0 && w <= 1.0) {
                failure.get_or_insert_with(|| format!("w({k}, {m}) = {w} outside (0, 1]"));
            }
            err = nan_max(err, (w - ctx.table.weight(m, k)).abs());
            if let (Ok(a), Ok(b), Ok(c)) = (q_factorial(k, ctx.q), q_factorial(m, ctx.q), q_factorial(k + m, ctx.q)) {
                err = nan_max(err, (w - a * b / c).abs() / w.max(f64::MIN_POSITIVE));
            }
        }
    }
    CheckResult::measured("weight_table", err, WEIGHT_TOL, (n + 1) * (n + 2) / 2).with_failure(failure)
}

fn check_qnum(ctx: &Context) -> CheckResult {
    let mut err = 0.0_f64;
    let mut failure = None;
    let mut samples = 0;
    for n in 1..=QNUM_MAX_N {
        for k in 1..n {
            let (Ok(b), Ok(l), Ok(r)) = (
                q_binomial(n, k, ctx.q),
                q_binomial(n - 1, k - 1, ctx.q),
                q_binomial(n - 1, k, ctx.q),
            ) else {
                continue;
            };
            if b < 1.0 {
                failure.get_or_insert_with(|| format!("[{n} choose {k}]_q = {b} < 1"));
            }
            err = nan_max(err, (b - (l + ctx.q.pow(k) * r)).abs() / b);
            samples += 1;
        }
    }
    CheckResult::measured("q_binomial_identities", err, QNUM_TOL, samples).with_failure(failure)
}

fn check_monomial_rule(ctx: &Context) -> CheckResult {
    let name = "monomial_rule_vs_integral_oracle";
    let oracle = match ctx.oracle() {
        Ok(o) => o,
        Err(e) => return CheckResult::errored(name, ORACLE_TOL, &e),
    };
    let mut s = ctx.sampler(1);
    let max_deg = MONOMIAL_MAX_DEGREE.min(ctx.order);
    let mut err = 0.0_f64;
    let mut samples = 0;
    for n in 0..=max_deg {
        for m in 0..=max_deg {
            let f = TruncatedSeries::monomial(n, n);
            let g = TruncatedSeries::monomial(m, m);
            let fg = ctx.product(&f, &g, n + m);
            for _ in 0..MONOMIAL_POINTS {
                let p = s.disc_point(MONOMIAL_RADIUS);
                err = nan_max(err, (oracle.definition(&f, &g, p) - fg.evaluate(p)).norm());
                samples += 1;
            }
        }
    }
    CheckResult::measured(name, err, ORACLE_TOL, samples)
}

fn check_rewritings(ctx: &Context) -> CheckResult {
    let name = "rewritings_ra1_ra2";
    let mut s = ctx.sampler(2);
    let (f, g) = (s.series(4), s.series(4));
    let fg = ctx.product(&f, &g, 8);
    let oracle = match ctx.oracle() {
        Ok(o) => o,
        Err(e) => return CheckResult::errored(name, ORACLE_TOL, &e),
    };
    let mut err = 0.0_f64;
    for _ in 0..MONOMIAL_POINTS {
        let p = s.disc_point(MONOMIAL_RADIUS);
        let (duh, ra1, ra2) = (oracle.definition(&f, &g, p), oracle.ra1(&f, &g, p), oracle.ra2(&f, &g, p));
        let coef = fg.evaluate(p);
        for (a, b) in [(duh, ra1), (duh, ra2), (ra1, ra2), (duh, coef)] {
            err = nan_max(err, (a - b).norm());
        }
    }
    CheckResult::measured(name, err, ORACLE_TOL, MONOMIAL_POINTS)
}

fn check_commutativity(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(3);
    let n = ctx.order;
    let err = (0..AXIOM_TRIALS)
        .map(|_| {
            let (f, g) = (s.series(n), s.series(n));
            ctx.product(&f, &g, n).max_abs_diff(&ctx.product(&g, &f, n))
        })
        .fold(0.0, nan_max);
    CheckResult::measured("algebra_commutativity", err, COMMUTATIVITY_TOL, AXIOM_TRIALS)
}

fn check_unit(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(4);
    let n = ctx.order;
    let one = TruncatedSeries::one(0);
    let err = (0..AXIOM_TRIALS)
        .map(|_| {
            let f = s.series(n);
            nan_max(ctx.product(&f, &one, n).max_abs_diff(&f), ctx.product(&one, &f, n).max_abs_diff(&f))
        })
        .fold(0.0, nan_max);
    CheckResult::measured("algebra_unit", err, UNIT_TOL, AXIOM_TRIALS)
}

fn check_associativity(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(5);
    let n = ctx.order;
    let wide = 2 * n;
    let err = (0..AXIOM_TRIALS)
        .map(|_| {
            let (f, g, h) = (s.series(n), s.series(n), s.series(n));
            let left = ctx.product(&ctx.product(&f, &g, wide), &h, wide);
            let right = ctx.product(&f, &ctx.product(&g, &h, wide), wide);
            left.max_abs_diff_upto(&right, n)
        })
        .fold(0.0, nan_max);
    CheckResult::measured("algebra_associativity", err, ASSOCIATIVITY_TOL, AXIOM_TRIALS)
}

fn check_norm(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(6);
    let n = ctx.order;
    let excess = (0..AXIOM_TRIALS)
        .map(|_| {
            let (f, g) = (s.series(n), s.series(n));
            let fg = ctx.product(&f, &g, 2 * n);
            fg.wiener_norm() - f.wiener_norm() * g.wiener_norm()
        })
        .fold(0.0, nan_max);
    CheckResult::measured("norm_submultiplicativity", excess, 0.0, AXIOM_TRIALS)
}

fn check_translation_bound(ctx: &Context) -> CheckResult {
    let name = "translation_norm_bound";
    let mut s = ctx.sampler(7);
    let mut excess = 0.0_f64;
    for _ in 0..TRANSLATION_TRIALS {
        let f = s.series(ctx.order);
        let xi = s.annulus(0.0, TRANSLATION_MAX_XI);
        let bound = match q_pochhammer_infinite(Complex64::new(-xi.norm(), 0.0), ctx.q, 1e-15) {
            Ok(p) => p.value.norm(),
            Err(e) => return CheckResult::errored(name, 0.0, &e),
        };
        let t = q_translate(&f, xi, ctx.q).wiener_norm();
        excess = nan_max(excess, t - bound * f.wiener_norm());
    }
    CheckResult::measured(name, excess, 0.0, TRANSLATION_TRIALS)
}

fn check_intertwining(ctx: &Context) -> CheckResult {
    let name = "translation_intertwining";
    let mut s = ctx.sampler(8);
    let f = s.series(ctx.order);
    let mut err = 0.0_f64;
    for _ in 0..INTERTWINING_SAMPLES {
        let xi = s.annulus(0.1, TRANSLATION_MAX_XI);
        let z = s.disc_point(0.9).value();
        match translation_intertwining_residual(&f, xi, z, ctx.q) {
            Ok(r) => err = nan_max(err, r),
            Err(e) => return CheckResult::errored(name, INTERTWINING_TOL, &e),
        }
    }
    CheckResult::measured(name, err, INTERTWINING_TOL, INTERTWINING_SAMPLES)
}

fn check_integration_by_parts(ctx: &Context) -> CheckResult {
    let name = "integration_by_parts";
    let mut s = ctx.sampler(9);
    let mut err = 0.0_f64;
    for _ in 0..IBP_SAMPLES {
        let (f, g) = (s.series(IBP_DEGREE), s.series(IBP_DEGREE));
        let p = s.disc_point(0.9 * ctx.q.value());
        match integration_by_parts_residual(&f, &g, ctx.q, p) {
            Ok(r) => err = nan_max(err, r),
            Err(e) => return CheckResult::errored(name, IBP_TOL, &e),
        }
    }
    CheckResult::measured(name, err, IBP_TOL, IBP_SAMPLES)
}

/// Deviation of `B(f *_q g)` from `B f . B g`, relative to the size of the
/// summands of each Cauchy coefficient.
fn check_borel(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(10);
    let n = ctx.order;
    let mut err = 0.0_f64;
    for _ in 0..BOREL_TRIALS {
        let (f, g) = (s.series(n), s.series(n));
        let (bf, bg) = (borel_transform(&f, ctx.q), borel_transform(&g, ctx.q));
        let lhs = borel_transform(&ctx.product(&f, &g, n), ctx.q);
        let rhs = cauchy_product(&bf, &bg, n);
        let abs_f = TruncatedSeries::from_fn(n, |k| Complex64::new(bf.coeff(k).norm(), 0.0));
        let abs_g = TruncatedSeries::from_fn(n, |k| Complex64::new(bg.coeff(k).norm(), 0.0));
        let scale = cauchy_product(&abs_f, &abs_g, n);
        for k in 0..=n {
            err = nan_max(err, (lhs.coeff(k) - rhs.coeff(k)).norm() / scale.coeff(k).re.max(1.0));
        }
    }
    CheckResult::measured("borel_homomorphism", err, BOREL_TOL, BOREL_TRIALS)
}

fn check_vq_power(ctx: &Context) -> CheckResult {
    let name = "vq_power_identity";
    let mut s = ctx.sampler(11);
    let mut err = 0.0_f64;
    for _ in 0..VQ_POWER_TRIALS {
        let f = s.series(VQ_POWER_DEGREE);
        for n in 1..=VQ_POWER_MAX_N {
            let iterated = (0..n).fold(f.clone(), |acc, _| jackson_integral_coeff(&acc, ctx.q));
            let fact = match q_factorial(n, ctx.q) {
                Ok(v) => v,
                Err(e) => return CheckResult::errored(name, VQ_POWER_TOL, &e),
            };
            let zn = TruncatedSeries::monomial(n, n);
            let rhs = ctx.product(&zn, &f, VQ_POWER_DEGREE + n).scale(Complex64::new(1.0 / fact, 0.0));
            err = nan_max(err, iterated.max_abs_diff(&rhs));
        }
    }
    CheckResult::measured(name, err, VQ_POWER_TOL, VQ_POWER_TRIALS * VQ_POWER_MAX_N)
}

fn check_invertibility(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(12);
    let n = ctx.order;
    let mut err = 0.0_f64;
    let mut failure = None;
    for _ in 0..INVERT_TRIALS {
        let f = s.series_with_head_at_least(n, INVERT_MIN_HEAD);
        match invert_duhamel(&f, ctx.q, n, default_sing_tol(&f)) {
            Ok(g) => {
                let back = ctx.product(&f, &g, n);
                err = nan_max(err, back.max_abs_diff(&TruncatedSeries::one(n)));
            }
            Err(e) => {
                failure.get_or_insert_with(|| format!("invertible input rejected: {e}"));
            }
        }
    }
    for _ in 0..SINGULAR_TRIALS {
        let f = s.series_with_head(n, Complex64::new(0.0, 0.0));
        if !matches!(invert_duhamel(&f, ctx.q, n, default_sing_tol(&f)), Err(Error::Singular { .. })) {
            failure.get_or_insert_with(|| "f(0) = 0 did not raise the singularity error".to_string());
        }
    }
    CheckResult::measured("invertibility_dichotomy", err, ROUND_TRIP_TOL, INVERT_TRIALS + SINGULAR_TRIALS)
        .with_failure(failure)
}

fn check_commutant(ctx: &Context) -> CheckResult {
    let name = "commutant_reconstruction";
    let mut s = ctx.sampler(13);
    let n = ctx.order;
    let v = vq_matrix(ctx.q, n);
    let mut err = 0.0_f64;
    for _ in 0..COMMUTANT_TRIALS {
        let f = s.series(n);
        let d = duhamel_operator_matrix_with(&ctx.table, &f, n);
        let comm = (&(&d * &v) - &(&v * &d)).max_abs_leading(n.max(1));
        err = nan_max(err, comm);
        match commutant_reconstruct(&d, ctx.q, COMMUTANT_TOL) {
            Ok(fit) => err = nan_max(nan_max(err, fit.residual), fit.symbol.max_abs_diff(&f)),
            Err(e) => return CheckResult::errored(name, COMMUTANT_TOL, &e),
        }
    }
    CheckResult::measured(name, err, COMMUTANT_TOL, COMMUTANT_TRIALS)
}

fn check_operator_homomorphism(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(14);
    let n = ctx.order;
    let err = (0..COMMUTANT_TRIALS)
        .map(|_| {
            let (f, g) = (s.series(n), s.series(n));
            let df = duhamel_operator_matrix_with(&ctx.table, &f, n);
            let dg = duhamel_operator_matrix_with(&ctx.table, &g, n);
            let dfg = duhamel_operator_matrix_with(&ctx.table, &ctx.product(&f, &g, n), n);
            (&(&df * &dg) - &dfg).max_abs()
        })
        .fold(0.0, nan_max);
    CheckResult::measured("operator_homomorphism", err, COMMUTANT_TOL, COMMUTANT_TRIALS)
}

fn check_cyclicity(ctx: &Context) -> CheckResult {
    let mut s = ctx.sampler(15);
    let n = ctx.order;
    let mut err = 0.0_f64;
    let mut failure = None;
    for i in 0..CYCLICITY_TRIALS {
        let f = if i % 5 == 0 {
            s.series_with_head(n, Complex64::new(0.0, 0.0))
        } else {
            s.series_with_head_at_least(n, INVERT_MIN_HEAD)
        };
        let r = cyclicity_check(&f, ctx.q, n);
        if r.cyclic != (f.head().norm() > 0.0) {
            failure.get_or_insert_with(|| format!("cyclicity misreported for f(0) = {}", f.head()));
        }
        if r.cyclic {
            err = nan_max(err, r.relative_error());
        }
    }
    CheckResult::measured("cyclicity", err, DETERMINANT_TOL, CYCLICITY_TRIALS).with_failure(failure)
}

fn check_compactness(ctx: &Context) -> CheckResult {
    let name = "compactness_diagnostics";
    match compactness_diagnostics(ctx.q, ctx.order.max(1), COMPACTNESS_TOL) {
        Ok(r) => {
            let failure = (!r.holds()).then(|| "V_q weight structure not as expected".to_string());
            CheckResult::measured(name, r.remainder_tail_max, COMPACTNESS_TOL, r.order + 1).with_failure(failure)
        }
        Err(e) => CheckResult::errored(name, COMPACTNESS_TOL, &e),
    }
}

fn check_classical_limit(_ctx: &Context) -> CheckResult {
    let q = QParam::new(CLASSICAL_LIMIT_Q).expect("in band");
    let table = DuhamelTable::new(q, CLASSICAL_MAX_DEGREE);
    let fact = |n: usize| (1..=n).map(|j| j as f64).product::<f64>();
    let mut err = 0.0_f64;
    let mut samples = 0;
    for k in 0..=CLASSICAL_MAX_DEGREE {
        for m in 0..=CLASSICAL_MAX_DEGREE - k {
            let classical = fact(k) * fact(m) / fact(k + m);
            err = nan_max(err, (table.weight(k, m) - classical).abs() / classical);
            samples += 1;
        }
    }
    CheckResult::measured("classical_limit", err, CLASSICAL_TOL, samples)
}
