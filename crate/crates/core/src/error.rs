use std::io;

use thiserror::Error;

/// Errors produced anywhere in the compression or decompression pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error at byte offset {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid header format: {0}")]
    HeaderFormat(String),

    #[error("format error at offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("corrupt archive: {0}")]
    Corrupt(String),

    #[error("{backend} backend failed: {source}")]
    Backend {
        backend: &'static str,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn corrupt(message: impl Into<String>) -> Self {
        Error::Corrupt(message.into())
    }

    pub(crate) fn parameter(message: impl Into<String>) -> Self {
        Error::Parameter(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
