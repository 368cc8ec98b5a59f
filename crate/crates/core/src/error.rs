use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the instance-generation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("io error: {0}")]
    Stream(#[from] io::Error),

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("duplicate document id {id:?} on lines {first} and {second}")]
    DuplicateId {
        id: String,
        first: usize,
        second: usize,
    },

    #[error("vocabulary is missing special token {0}")]
    MissingSpecial(&'static str),

    #[error("vocabulary line {line}: duplicate token {token:?} (first seen on line {first})")]
    DuplicateToken {
        token: String,
        first: usize,
        line: usize,
    },

    #[error("document {0:?} has no outlinks")]
    NoOutlinks(String),

    #[error("unknown document id {0:?}")]
    UnknownDocument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("mix cannot produce any instance for this corpus: {0}")]
    InfeasibleMix(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            line,
            message: message.into(),
        }
    }
}
