use std::path::PathBuf;

use thiserror::Error;

/// Everything the CLI can fail with, mapped onto the exit-code contract.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qexp::Error),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid {field}: {message}")]
    Parse { field: String, message: String },

    #[error("{failed} invariant(s) failed")]
    SuiteFailure { failed: usize },
}

impl CliError {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailure { .. } => 1,
            CliError::Core(qexp::Error::Convergence { .. }) => 3,
            CliError::Core(qexp::Error::Domain { .. }) => 4,
            CliError::Core(qexp::Error::Validation { .. }) | CliError::Io { .. } | CliError::Parse { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::SuiteFailure { .. } => "suite_failure",
            CliError::Core(qexp::Error::Convergence { .. }) => "convergence",
            CliError::Core(qexp::Error::Domain { .. }) => "domain",
            _ => "validation",
        }
    }

    /// Offending field path, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Core(qexp::Error::Validation { field, .. }) | CliError::Parse { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
