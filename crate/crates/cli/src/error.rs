use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
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

    #[error("schema: {0}")]
    Schema(String),

    #[error("row {row}, column {column}: cannot parse {value:?}")]
    Parse { row: usize, column: String, value: String },

    #[error("row {row}, column {column}: unknown rating grade {value:?}")]
    Grade { row: usize, column: String, value: String },

    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: zm_core::Error,
    },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("model artifact {path}, line {line}: {message}")]
    Artifact { path: PathBuf, line: usize, message: String },

    #[error("toy check failed at {0}")]
    ToyMismatch(String),

    #[error(transparent)]
    Core(#[from] zm_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for invalid input or failed checks, 2 for I/O, 3 for numerical fits.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Csv { source, .. } if source.is_io_error() => 2,
            CliError::Core(e) | CliError::Row { source: e, .. } if e.is_numerical() => 3,
            _ => 1,
        }
    }
}
