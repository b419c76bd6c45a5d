use crate::basis::Frame;

/// Errors raised by model construction, numerics and configuration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("{what} requires {requested} sites but the cap is {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("frame mismatch: expected {expected:?}, found {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("oracle check failed: {0}")]
    Oracle(String),

    #[error("configuration rejected:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl Error {
    /// Process exit status for a command-line run: 2 for rejected input,
    /// 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Resource { .. } | Error::Config(_) => 2,
            Error::Integration(_) | Error::Oracle(_) => 3,
            Error::FrameMismatch { .. } | Error::Dimension { .. } | Error::Io { .. } => 1,
        }
    }
}
