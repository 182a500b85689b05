use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration failure at kappa*t = {time}: {reason}")]
    IntegrationFailure { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_local_dim(local_dim: usize) -> Result<()> {
    match local_dim {
        2 | 3 => Ok(()),
        other => Err(invalid(format!("local dimension {other} is not supported (expected 2 or 3)"))),
    }
}
