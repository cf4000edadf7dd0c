use std::io;

/// Errors surfaced by the experiments, file formats and CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fbmvar_core::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("I/O: {0}")]
    Io(#[from] io::Error),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 1 for domain, regime and configuration errors,
    /// 2 for anything involving files.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(_) | Error::Config(_) => 1,
            Error::Io(_) | Error::Format(_) | Error::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
