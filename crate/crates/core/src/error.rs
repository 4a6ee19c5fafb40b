use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("key format error at position {position}: {message}")]
    KeyFormat { position: usize, message: String },

    #[error("sequence length {actual} does not match image size {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("image too small: {0}")]
    TooSmall(String),

    #[error("malformed image: {0}")]
    Malformed(String),

    #[error("unsupported image: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("entropy source failure: {0}")]
    Entropy(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
