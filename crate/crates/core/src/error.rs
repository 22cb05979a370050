use thiserror::Error;

/// Errors raised by the simulation, differentiation and optimization layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("domain error at index {index}: value {value} must be strictly positive")]
    Domain { index: usize, value: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("non-finite value at step {tau}: loss = {loss}, gradient norm = {grad_norm}")]
    NonFinite {
        tau: usize,
        loss: f64,
        grad_norm: f64,
    },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
