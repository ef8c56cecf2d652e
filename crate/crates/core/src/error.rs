use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexdivError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate text id `{0}`")]
    DuplicateId(String),

    #[error("no token files found in {0}")]
    EmptyDirectory(PathBuf),

    #[error("{path}: line {line}: {message}")]
    Csv {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("text shorter than truncation length ({len} < {requested})")]
    TooShort { len: usize, requested: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{index}: {message}")]
    Index { index: String, message: String },

    #[error("condition {condition}: {message}")]
    Condition { condition: String, message: String },

    #[error("text `{id}`: {source}")]
    Text {
        id: String,
        #[source]
        source: Box<LexdivError>,
    },

    #[error("{0}")]
    Stats(String),

    #[error("{0}")]
    Config(String),
}

impl LexdivError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LexdivError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LexdivError::InvalidArgument(msg.into())
    }

    pub(crate) fn in_text(self, id: &str) -> Self {
        LexdivError::Text {
            id: id.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, LexdivError>;
