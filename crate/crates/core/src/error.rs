use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the detection and benchmark stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error("kernel `{name}` is not available at size {size}")]
    UnsupportedSize { name: String, size: usize },
    #[error("kernel `{name}` belongs to the {found} family, expected {expected}")]
    WrongFamily {
        name: String,
        found: &'static str,
        expected: &'static str,
    },
    #[error("compass rotation needs a 3x3 base kernel, got {rows}x{cols}")]
    NotCompassBase { rows: usize, cols: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("unsupported channel count {0}")]
    UnsupportedChannels(u8),
    #[error("invalid dataset layout: {0}")]
    Dataset(String),
    #[error("failed to decode image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
