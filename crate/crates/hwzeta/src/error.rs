use thiserror::Error;

/// Error type shared by all modules.
///
/// The variants map onto process exit codes: `Input` is a usage or
/// instance-file problem (exit 2), `CheckFailed` is a mathematical check
/// that ran to completion and failed (exit 1), and `Internal` signals a
/// violated invariant that should be impossible on correct code and
/// correct instance data (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::GuardExceeded(_) => 2,
            Error::CheckFailed(_) => 1,
            Error::Internal(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
