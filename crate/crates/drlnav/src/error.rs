//! Crate-wide error type.
//!
//! Variants are grouped by how the CLI reports them: configuration problems
//! exit with code 1, I/O and file-format problems with code 2, and runtime
//! failures with code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value; the message names the offending field.
    #[error("config error: {0}")]
    Config(String),

    /// A numerically invalid control input (NaN or infinite component).
    #[error("invalid action: {0}")]
    InvalidAction(String),

    /// Obstacle placement could not satisfy the separation constraints.
    #[error("world generation failed: {0}")]
    WorldGen(String),

    /// Rejection sampling exhausted its attempt budget.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// Tensor dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An operation was applied in a state that cannot accept it,
    /// e.g. stepping an episode that already terminated.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed binary file; `section` and `offset` locate the failure.
    #[error("format error in section `{section}` at byte {offset}: {message}")]
    Format {
        section: &'static str,
        offset: u64,
        message: String,
    },

    /// Malformed text input (CSV, TOML, world file) with a line number
    /// when one is known.
    #[error("parse error{}: {message}", line.map(|n| format!(" at line {n}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io(_) | Error::Format { .. } | Error::Parse { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
