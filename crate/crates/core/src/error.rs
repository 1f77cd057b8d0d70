use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("insufficient trials: {0}")]
    InsufficientTrials(String),
}

pub type Result<T> = std::result::Result<T, Error>;
