//! Library half of the `cpkernel` binary: CSV ingestion, experiment
//! configuration and result writers, shared with the integration tests.

pub mod config;
pub mod ingest;
pub mod report;

/// CLI failures split by exit code: usage/input problems exit 1,
/// estimation failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Estimation(String),
}

impl From<cpkernel_core::Error> for CliError {
    fn from(e: cpkernel_core::Error) -> Self {
        match e {
            cpkernel_core::Error::Estimation(_) => Self::Estimation(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
