use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Variants map one-to-one onto the CLI exit codes: invalid input (1),
/// resource caps (2), oracle/assertion mismatches (3) and solver failures (4).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} needs {size} elements, above the configured cap of {cap}")]
    ResourceCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("element of level {level} is not in G_{max_level}")]
    LevelMismatch { level: u32, max_level: u32 },

    #[error("integer overflow in exact group arithmetic")]
    Overflow,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
