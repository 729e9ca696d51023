use std::process::ExitCode;

/// Failure of a run, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Invalid configuration or arguments (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// The numerics aborted or a verification failed (exit 3).
    #[error("numerical abort: {0}")]
    Numerical(String),
    /// Output could not be written (exit 1).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

impl From<dtdvp_core::Error> for RunError {
    fn from(e: dtdvp_core::Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.into())
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Io(e.into())
    }
}
