use thiserror::Error;

use crate::operator::BasisTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: BasisTag, found: BasisTag },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time {t:e} s outside [0, {duration:e}] s")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} > tolerance {tolerance:e}")]
    Quadrature { achieved: f64, tolerance: f64 },

    #[error("step size {step:e} s exceeds the bound {bound:e} s for rk4_fixed")]
    StepTooLarge { step: f64, bound: f64 },

    #[error("adaptive integrator failed at t = {t:e} s: {reason}")]
    AdaptiveFailure { t: f64, reason: String },

    #[error("{quantity} drifted to {value:e} at t = {t:e} s (limit {limit:e})")]
    Invariant {
        quantity: &'static str,
        value: f64,
        limit: f64,
        t: f64,
    },

    #[error("drive coefficient beta[{m},0] = {value:e} is below 1e-3")]
    SmallCoefficient { m: usize, value: f64 },

    #[error("regime check failed: {0}")]
    Regime(String),

    #[error("convergence check failed: {0}")]
    Convergence(String),

    #[error("fit did not converge (rms residual {rms:e})")]
    FitFailed { rms: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Process exit codes for the command-line harness.
pub const EXIT_REGIME: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;
/// Invalid input or configuration.
pub const EXIT_USAGE: i32 = 1;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Regime(_) => EXIT_REGIME,
            Error::Convergence(_)
            | Error::Quadrature { .. }
            | Error::StepTooLarge { .. }
            | Error::AdaptiveFailure { .. }
            | Error::Invariant { .. }
            | Error::FitFailed { .. } => EXIT_CONVERGENCE,
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
