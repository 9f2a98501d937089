use std::io;

/// A configuration problem, attributed to one key.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid `{key}`: {message}")]
pub struct UsageError {
    pub key: String,
    pub message: String,
}

impl UsageError {
    pub fn new(key: &str, message: String) -> Self {
        UsageError { key: key.to_string(), message }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error("cannot write report: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] isoglue_core::Error),
}

impl CliError {
    /// Every error stops a run before it reaches a verdict, so all of them
    /// exit with 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
