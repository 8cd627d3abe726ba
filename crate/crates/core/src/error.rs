use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the training and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("no trainable words: vocabulary is empty after applying min_count")]
    NoTrainableWords,

    #[error("hierarchical softmax needs at least two vocabulary words, got one")]
    SingleWord,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model file: {0}")]
    Model(#[from] ModelParseError),

    #[error("{path}:{line}: {message}")]
    Questions {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("worker {worker} panicked: {message}")]
    WorkerPanic { worker: usize, message: String },
}

/// Parse failures when reading a word2vec text or binary model.
#[derive(Debug, Error)]
pub enum ModelParseError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("truncated file: expected {expected} rows, found {found}")]
    TruncatedRow { expected: usize, found: usize },

    #[error("row {row} ({word}): expected {expected} components, found {found}")]
    DimensionMismatch {
        row: usize,
        word: String,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: invalid component {value:?}")]
    InvalidNumber { row: usize, value: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn with_path(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn with_path(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.into(),
            source,
        })
    }
}
