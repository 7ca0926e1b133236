use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violated a documented precondition or type invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A line-oriented input file failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An instance exceeds a solver's configured capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The LP solver could not reach a numerically trustworthy optimum.
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
