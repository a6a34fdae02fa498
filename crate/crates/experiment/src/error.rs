use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    /// Bad or inconsistent configuration; maps to exit code 1.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("comparison error: {0}")]
    Compare(String),
    #[error(transparent)]
    Core(#[from] dmsrl_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config(_) | Self::Compare(_))
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;
