use thiserror::Error;

/// Error type shared by all estimation, smoothing and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is invalid (non-positive bandwidth, bad kernel
    /// spec, inconsistent simulation settings, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data violates a structural precondition (length mismatch,
    /// non-finite values, too few observations to form a sample).
    #[error("invalid data: {0}")]
    Data(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Estimation cannot proceed on this input (empty trim region, failed
    /// bandwidth search, sample below the minimum size).
    #[error("estimation error: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
