use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input (JSON, rational literal, argument).
    #[error("parse error: {0}")]
    Parse(String),
    /// A precondition of a construction does not hold for the given data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    /// The result exists but has no exact finite representation here.
    #[error("not representable: {0}")]
    Representability(String),
    /// A verified identity or inequality failed on concrete data.
    #[error("check failed: {0}")]
    Check(String),
}

impl Error {
    /// Process exit status used by the command line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 1,
            Error::Hypothesis(_) => 2,
            Error::Representability(_) => 3,
            Error::Check(_) => 4,
        }
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn repr(msg: impl Into<String>) -> Self {
        Error::Representability(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
