use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("token not in embedding vocabulary: {0:?}")]
    NotInVocabulary(String),

    #[error("MTLD undefined: a scan direction produced zero factors")]
    UndefinedMtld,

    #[error("corpus length mismatch: hypothesis has {hyp} sentences, reference has {reference}")]
    LengthMismatch { hyp: usize, reference: usize },

    #[error("no token pair is scoreable: {0}")]
    Unscoreable(String),

    #[error("stale replacement plan at sentence {sentence}, token {token}: expected {expected:?}, found {found:?}")]
    StalePlan {
        sentence: usize,
        token: usize,
        expected: String,
        found: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model file format error at line {line}: {message}")]
    ModelFormat { line: usize, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
