//! Error type shared across the toolkit.

use std::path::{Path, PathBuf};

/// Unified error for all toolkit operations.
///
/// `InvalidArgument` covers contract violations on in-memory inputs
/// (mismatched shapes, out-of-range parameters). `Format` covers anything
/// wrong with external data: unparsable or structurally invalid files, with
/// enough context (path, line, frame index) to locate the offending record.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error{}: {detail}", path.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default())]
    Format {
        path: Option<PathBuf>,
        detail: String,
    },

    #[error("mask is empty: no panorama pixel is covered by any frame")]
    EmptyMask,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn format(path: Option<&Path>, detail: impl Into<String>) -> Self {
        Error::Format {
            path: path.map(Path::to_path_buf),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
