use alloc::string::String;

/// Errors reported by the identification toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("scale {scale} s is below the resolvable limit 2·dt = {limit} s")]
    Resolution { scale: f64, limit: f64 },
    #[error("unsupported scale grid: {0}")]
    UnsupportedGrid(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("ill-conditioned Toeplitz system (condition estimate {0:e}); increase regularization")]
    IllConditioned(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("discretization too coarse: {0}")]
    Discretization(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or usage).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Resolution { .. }
                | Error::Calibration(_)
                | Error::InsufficientData(_)
                | Error::IllConditioned(_)
                | Error::Discretization(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
