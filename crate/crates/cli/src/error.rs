use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    Numerical(#[from] einsel_core::Error),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config_invalid",
            RunError::Numerical(_) => "numerical_invariant",
            RunError::Io { .. } => "io_failure",
        }
    }

    /// One-line JSON record for the diagnostic stream.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Core errors raised while turning a config into model inputs are config
/// problems, not numerical ones.
pub(crate) fn config_err(e: einsel_core::Error) -> RunError {
    RunError::Config(e.to_string())
}
