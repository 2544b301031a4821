use std::path::PathBuf;

use qrelay::analytics::AnalyticsError;
use qrelay::protocols::ProtocolError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("regression check failed: {0} of {1} comparisons out of band")]
    Regression(usize, usize),
    #[error("truncation not converged: largest concurrence change {max_change:.3e} exceeds {tolerance:.0e}")]
    Convergence { max_change: f64, tolerance: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) | CliError::Write { .. } => 1,
            CliError::Config(_) | CliError::Read { .. } => 2,
            CliError::Regression(..) => 3,
            CliError::Convergence { .. } => 4,
        }
    }
}

// Invalid settings reach the protocols as `InvalidConfig` or
// `TruncationTooSmall`; everything else is a failure of the numerics.
impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::InvalidConfig(_) | ProtocolError::TruncationTooSmall(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Protocol(p) => p.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
