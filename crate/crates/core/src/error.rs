use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, GameError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GameError::InvalidParameter(msg.into()))
}
