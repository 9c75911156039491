use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: byte {offset}: {message}")]
    Syntax { path: String, offset: usize, message: String },
    #[error(transparent)]
    Core(#[from] entrocone::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn input<T>(path: &str, message: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input { path: path.to_string(), message: message.into() })
}
