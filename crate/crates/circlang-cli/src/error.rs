use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: circlang::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn numerical(context: impl Into<String>, source: circlang::Error) -> Self {
        CliError::Numerical { context: context.into(), source }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Exit code: non-convergence and cancellation are numerical failures;
    /// arguments outside a routine's domain are usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical { source, .. } => match source {
                circlang::Error::NonConvergence { .. } | circlang::Error::Cancellation { .. } => exit::NON_CONVERGENCE,
                _ => exit::USAGE,
            },
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Csv { .. } | CliError::Json { .. } => exit::VALIDATION_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
