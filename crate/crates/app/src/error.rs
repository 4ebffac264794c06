use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigErrors;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),

    #[error(transparent)]
    Model(#[from] echomem::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    /// An oracle comparison fell outside its tolerance.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for anything the user can fix in the input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Io { .. } | AppError::Usage(_) => 1,
            AppError::Model(
                echomem::Error::InvalidParameter { .. } | echomem::Error::StageOverlap(_),
            ) => 1,
            AppError::Model(_) | AppError::CheckFailed(_) | AppError::Pool(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
