use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum HarnessError {
    /// Bad flags or an inconsistent configuration; the CLI exits with 2.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Polar(#[from] polar_sym::PolarError),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Whether the failure stems from user input rather than the run itself.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config(_) | HarnessError::Polar(_))
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
