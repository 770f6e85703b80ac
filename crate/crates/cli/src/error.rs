use std::path::PathBuf;

use subdiff_core::Error as CoreError;

/// Errors surfaced by the harness, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(#[from] CoreError),
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
    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 configuration, 3 solver, 4 acceptance, 5 input/output.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(
                CoreError::Config(_)
                | CoreError::InvalidSpec(_)
                | CoreError::InvalidOrder(_)
                | CoreError::InvalidGrid(_)
                | CoreError::Subdomain(_)
                | CoreError::Coefficient(_),
            ) => 2,
            CliError::Solver(_) => 3,
            CliError::Acceptance(_) => 4,
            CliError::Io { .. } | CliError::Csv { .. } => 5,
        }
    }
}
