use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, SpexError>;

#[derive(Debug, thiserror::Error)]
pub enum SpexError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("label count mismatch: {labels} labels for {points} points")]
    LabelCountMismatch { labels: usize, points: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    MissingCentroids(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl SpexError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SpexError::InvalidArgument(msg.into())
    }
}
