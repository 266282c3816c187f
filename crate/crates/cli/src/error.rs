use std::path::PathBuf;

use thiserror::Error;

/// Failures of a run, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: bql_core::Error,
    },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error in {}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl CliError {
    /// 2 for configuration, 3 for numerical failures, 4 for IO and format.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } | CliError::Format { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attaches a context string to core errors.
pub(crate) trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for bql_core::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numerical {
            context: what.to_string(),
            source,
        })
    }
}
