use std::io;

use thiserror::Error;

use crate::hex::Cell;

/// Errors produced anywhere in the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("illegal move at {0}")]
    IllegalMove(Cell),

    /// A call violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// An experiment description failed to parse or validate.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// A text or binary file did not match its expected layout.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
