use thiserror::Error;

/// Errors raised when building or running a model.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("empty sample")]
    EmptySample,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    pub fn param(key: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
