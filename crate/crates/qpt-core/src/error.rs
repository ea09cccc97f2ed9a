//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, estimation, and fitting routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Charge-basis truncation too small for the requested accuracy.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Ramsey delay calibration impossible for the requested transition.
    #[error("calibration error: {0}")]
    Calibration(String),

    /// Two-tone calibration could not resolve both frequencies.
    #[error("ambiguous calibration: {0}")]
    Ambiguity(String),

    /// A discarded trace was passed to an estimator that requires valid data.
    #[error("trace discarded ({reason}): refusing spectral estimation")]
    DiscardedTrace { reason: String },

    /// Not enough data for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Frequency grids of two spectra do not match.
    #[error("frequency grid mismatch: {0}")]
    GridMismatch(String),

    /// Iterative fit did not converge within the iteration budget.
    #[error("fit did not converge after {iterations} iterations (cost {cost:.3e}, step {step:.3e})")]
    FitNonConvergence {
        iterations: usize,
        cost: f64,
        step: f64,
    },

    /// A regression design matrix was rank deficient.
    #[error("rank-deficient regression: {0}")]
    RankDeficient(String),

    /// Malformed input file or record.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
