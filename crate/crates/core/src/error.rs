use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed a configured memory or size budget.
    #[error("resource limit exceeded: {what} = {requested} exceeds the limit {limit}")]
    Resource {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    /// The evaluation grid cannot resolve the requested arc set.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A function specification string failed to parse.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
