use std::path::PathBuf;

use hhl_core::HhlError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),

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

    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: no data rows")]
    EmptyCsv { path: PathBuf },

    #[error("{path}: row {row}: cannot parse {column:?} value {value:?}")]
    BadValue {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error(transparent)]
    Core(#[from] HhlError),
}

impl BenchError {
    /// Errors caused by the user's input rather than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            BenchError::Config(_)
                | BenchError::Core(HhlError::Format(_) | HhlError::InvalidConfig(_))
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| BenchError::Csv { path, source }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
