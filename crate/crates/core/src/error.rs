use std::fmt;

/// Errors raised by the toolkit. Every variant maps onto one CLI exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} needs {needed} bytes but the memory budget is {limit} bytes")]
    Resource {
        what: String,
        needed: u64,
        limit: u64,
    },

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl fmt::Display) -> Self {
        Error::Parameter(msg.to_string())
    }

    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub(crate) fn format(offset: u64, msg: impl fmt::Display) -> Self {
        Error::Format {
            offset,
            message: msg.to_string(),
        }
    }

    /// A copy for errors that are cached and reported more than once. I/O and
    /// codec errors keep their message only.
    pub(crate) fn replay(&self) -> Self {
        match self {
            Error::Parameter(m) => Error::Parameter(m.clone()),
            Error::Domain(m) => Error::Domain(m.clone()),
            Error::Resource { what, needed, limit } => Error::Resource {
                what: what.clone(),
                needed: *needed,
                limit: *limit,
            },
            Error::Format { offset, message } => Error::Format {
                offset: *offset,
                message: message.clone(),
            },
            Error::Unknown { kind, name } => Error::Unknown { kind, name: name.clone() },
            other => Error::Parameter(other.to_string()),
        }
    }
}
