use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GamcError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("corrupt file: {0}")]
    Corrupt(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("feature layout mismatch: model expects {expected:016x}, input has {got:016x}")]
    LayoutMismatch { expected: u64, got: u64 },
    #[error(transparent)]
    Core(#[from] gamc_core::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl GamcError {
    /// Process exit status: 2 for bad input or configuration, 3 for broken
    /// internal invariants.
    pub fn exit_code(&self) -> u8 {
        match self {
            GamcError::Internal(_) => 3,
            GamcError::Core(gamc_core::Error::LayoutViolation { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, GamcError>;
