//! `qduhamel`: convolve, invert and evaluate series, and run the
//! verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or parse error,
//! 3 domain error, 4 singular input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;
use num_complex::Complex64;
use qduhamel_core::json::{format_complex, parse_series, series_to_json};
use qduhamel_core::opalg::{default_sing_tol, duhamel_solve_residual, invert_duhamel};
use qduhamel_core::qops::JACKSON_MAX_TERMS;
use qduhamel_core::verify::{run_suite, GlobalConfig, Status, SuiteReport, DEFAULT_ORDER, DEFAULT_SEED, DEFAULT_TOL};
use qduhamel_core::{duhamel_product, DiscPoint, Error, QParam, TruncatedSeries};

#[derive(Parser)]
#[command(name = "qduhamel", version, about = "q-Duhamel convolution toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Deformation parameter, 0 < q < 1.
    #[arg(long, global = true, conflicts_with = "q_grid")]
    q: Option<f64>,

    /// Comma-separated q values for `verify`.
    #[arg(long, global = true, value_delimiter = ',')]
    q_grid: Option<Vec<f64>>,

    /// Truncation order N.
    #[arg(long, global = true)]
    order: Option<usize>,

    /// Oracle tolerance for `verify`; round-trip tolerance for `invert`.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Ceiling on Jackson-sum terms in the integral oracle.
    #[arg(long, global = true, default_value_t = JACKSON_MAX_TERMS)]
    jackson_cutoff_max: usize,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print f *_q g.
    Duhamel { f: PathBuf, g: PathBuf },
    /// Print the *_q-inverse of f.
    Invert { f: PathBuf },
    /// Print f(z) as [re, im].
    Eval {
        f: PathBuf,
        /// Point of the unit disc, `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Run the identity checks over the q grid.
    Verify {
        /// Test mode: perturb one structure constant so the suite must fail.
        #[arg(long, hide = true)]
        corrupt_weights: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Domain(String),
    Singular(String),
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Input(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Singular(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Input(e.to_string()),
            Error::Singular { .. } => Failure::Singular(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn read_series(path: &Path) -> Result<TruncatedSeries, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_series(&text).map_err(|e| match e {
        Error::Parse(msg) => Failure::Input(format!("{}: {msg}", path.display())),
        other => Failure::from(other),
    })
}

fn single_q(common: &Common) -> Result<QParam, Failure> {
    let q = common.q.ok_or_else(|| Failure::Input("--q is required".into()))?;
    Ok(QParam::new(q)?)
}

fn parse_point(text: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Input(format!("invalid --z {text:?}: expected `re` or `re,im`"));
    let mut parts = text.split(',').map(|s| s.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify_config(common: &Common, corrupt_weights: bool) -> Result<GlobalConfig, Failure> {
    let mut config = GlobalConfig {
        order: common.order.unwrap_or(DEFAULT_ORDER),
        tol: common.tol,
        jackson_cutoff_max: common.jackson_cutoff_max,
        seed: common.seed,
        corrupt_weights,
        ..GlobalConfig::default()
    };
    let grid = match (common.q, &common.q_grid) {
        (Some(q), _) => Some(vec![q]),
        (None, Some(g)) => Some(g.clone()),
        (None, None) => None,
    };
    if let Some(values) = grid {
        config.q_grid = values
            .into_iter()
            .map(|q| QParam::new(q).map_err(|e| Failure::Input(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    config.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(config)
}

fn render_table(report: &SuiteReport) -> String {
    let mut s = String::new();
    for r in &report.reports {
        writeln!(s, "q = {}  N = {}", r.q, r.order).unwrap();
        for c in &r.checks {
            let mark = if c.status == Status::Pass { "PASS" } else { "FAIL" };
            writeln!(
                s,
                "  {mark}  {:<34} max_error {:>10.3e}  tol {:>8.1e}  samples {:>5}",
                c.name, c.max_error, c.tolerance, c.samples
            )
            .unwrap();
            if let Some(d) = &c.detail {
                writeln!(s, "        {d}").unwrap();
            }
        }
    }
    let total: usize = report.reports.iter().map(|r| r.checks.len()).sum();
    let passed: usize = report
        .reports
        .iter()
        .flat_map(|r| &r.checks)
        .filter(|c| c.status == Status::Pass)
        .count();
    let verdict = if report.passed() { "pass" } else { "fail" };
    writeln!(s, "summary: {verdict} ({passed}/{total} checks)").unwrap();
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = &cli.common;
    let out = common.out.as_deref();
    match cli.command {
        Command::Duhamel { f, g } => {
            let (f, g) = (read_series(&f)?, read_series(&g)?);
            let q = single_q(common)?;
            let n = common.order.unwrap_or(f.order().max(g.order()));
            emit(out, &(series_to_json(&duhamel_product(&f, &g, q, n)) + "\n"))
        }
        Command::Invert { f } => {
            let f = read_series(&f)?;
            let q = single_q(common)?;
            let n = common.order.unwrap_or(f.order());
            let inv = invert_duhamel(&f, q, n, default_sing_tol(&f))?;
            let residual = duhamel_solve_residual(&f, &inv, &TruncatedSeries::one(0), q, n);
            if !(residual <= common.tol) {
                warn!("round-trip residual {residual:e} exceeds tol {:e}", common.tol);
            }
            emit(out, &(series_to_json(&inv) + "\n"))
        }
        Command::Eval { f, z } => {
            let f = read_series(&f)?;
            let p = DiscPoint::new(parse_point(&z)?)?;
            emit(out, &(format_complex(f.evaluate(p)) + "\n"))
        }
        Command::Verify { corrupt_weights } => {
            let config = verify_config(common, corrupt_weights)?;
            let report = run_suite(&config).map_err(|e| Failure::Input(e.to_string()))?;
            eprint!("{}", render_table(&report));
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(out, &(json + "\n"))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(m) | Failure::Domain(m) | Failure::Singular(m) => eprintln!("error: {m}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
