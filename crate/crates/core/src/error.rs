use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its valid domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Inputs are individually valid but do not fit together.
    #[error("configuration error: {0}")]
    Config(String),

    /// The offered load is at or beyond the service rate; delays are unbounded.
    #[error("unstable system: arrival rate {lambda} >= service rate {mu}")]
    Unstable { lambda: f64, mu: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for errors caused by the environment rather than by bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
