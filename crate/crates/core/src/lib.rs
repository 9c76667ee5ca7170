//! q-Duhamel convolution on the Wiener disc algebra.
//!
//! Series are truncated coefficient vectors ([`TruncatedSeries`]); the
//! q-Duhamel product `*_q` acts on them through its structure constants
//! `[k]_q! [m]_q! / [k+m]_q!`, and the operators `D_f g = f *_q g` and
//! `V_q = D_z` become lower-triangular matrices ([`OperatorMatrix`]).

// `!(x < tol)` is used on purpose: NaN must fail a tolerance test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duhamel;
pub mod error;
pub mod json;
pub mod opalg;
pub mod qnum;
pub mod qops;
pub mod sample;
pub mod series;
pub mod verify;

pub use duhamel::{
    borel_transform, duhamel_integral_oracle, duhamel_product, duhamel_via_ra1, duhamel_via_ra2,
    inverse_borel, DuhamelTable, IntegralOracle,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use opalg::{
    commutant_reconstruct, compactness_diagnostics, cyclicity_check, default_sing_tol,
    duhamel_operator_matrix, duhamel_solve, invert_duhamel, vq_matrix, OperatorMatrix,
};
pub use qnum::{QArithmetic, QParam};
pub use series::{cauchy_product, DiscPoint, TruncatedSeries};
pub use verify::{GlobalConfig, SuiteReport, VerificationReport};
