use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Variants are grouped so that callers (the CLI, the C API) can map them onto
/// a small set of exit/status codes with [`Error::category`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix is not Hurwitz (max real part {max_real:.6e})")]
    NotHurwitz { max_real: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("Assumption 1 violated: averaged field matrix is not positive definite (margin {margin:.3e})")]
    Assumption1Violated { margin: f64 },

    #[error("design failure: {0}")]
    Design(String),

    #[error("T exceeds T*: sampling period {period} s is not below T* = {tstar} s")]
    PeriodExceedsTstar { period: f64, tstar: f64 },

    #[error("simulation diverged at t = {t} s (last valid t = {last_valid_t} s): {reason}")]
    Diverged {
        t: f64,
        last_valid_t: f64,
        reason: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes and C status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Design,
    Divergence,
    Numeric,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Validation(_)
            | Error::Parse(_)
            | Error::InvalidArgument(_)
            | Error::Domain(_) => ErrorCategory::Validation,
            Error::Assumption1Violated { .. }
            | Error::Design(_)
            | Error::PeriodExceedsTstar { .. }
            | Error::NotHurwitz { .. } => ErrorCategory::Design,
            Error::Diverged { .. } => ErrorCategory::Divergence,
            Error::NotSquare { .. } | Error::NoConvergence { .. } | Error::Singular(_) => {
                ErrorCategory::Numeric
            }
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
