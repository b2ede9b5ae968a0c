use thiserror::Error;

/// Failures surfaced by the front end, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qcap_core::Error),
}

impl CliError {
    /// `1` for bad input, `2` for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qcap_core::Error::NoConvergence { .. } | qcap_core::Error::Inconsistent { .. }) => 2,
            _ => 1,
        }
    }
}
