use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by distribution evaluation, estimation and testing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("value {value} lies below the support minimum {mu}")]
    BelowSupport { value: i64, mu: u64 },

    #[error("empty data")]
    EmptyData,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("test undefined: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
