use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the extraction and augmentation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dialogue {dialogue_id}: {message}")]
    Validation { dialogue_id: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("span {0} is not covered by the slot grouping")]
    MissingSpan(String),

    #[error("unknown slot name `{0}` in gold annotation")]
    UnknownSlot(String),

    #[error("encoder failure: {0}")]
    Encoder(String),

    #[error("{0}")]
    BackendUnavailable(String),

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Validation { .. }
            | Error::InvalidInput(_)
            | Error::UnknownSlot(_)
            | Error::MissingSpan(_)
            | Error::Format { .. }
            | Error::BackendUnavailable(_) => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
