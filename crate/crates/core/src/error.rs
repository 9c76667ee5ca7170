use thiserror::Error;

/// Errors raised by the q-calculus primitives and the operator layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: index {index} beyond table size {capacity}")]
    Capacity { index: usize, capacity: usize },

    #[error("overflow computing {0}")]
    Overflow(String),

    /// `value` is `|f(0)|`.
    #[error("not invertible: f(0)={value} (|f(0)| <= {threshold:e})")]
    Singular { value: f64, threshold: f64 },

    #[error("operator is not in the commutant of V_q: commutator norm {residual:e} exceeds {tolerance:e}")]
    NotInCommutant { residual: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
