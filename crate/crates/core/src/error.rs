//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Tensor or sequence dimensions do not line up.
    ShapeMismatch { context: String },
    /// A configuration value is out of its legal range.
    InvalidParam(String),
    /// Cross-correlation produced no usable peak during synchronization.
    SyncAmbiguous,
    /// LMS tap energy exceeded the divergence bound.
    FfeDiverged { step: usize, norm: f64 },
    /// Training produced a non-finite loss.
    NanLoss { epoch: usize, step: usize },
    /// Normalization over a constant sequence.
    ZeroVariance,
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { context } => write!(f, "shape mismatch: {context}"),
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SyncAmbiguous => write!(f, "synchronization failed: flat correlation"),
            Error::FfeDiverged { step, norm } => {
                write!(f, "FFE diverged at step {step} (tap norm {norm:.3e})")
            }
            Error::NanLoss { epoch, step } => {
                write!(f, "non-finite loss at epoch {epoch}, step {step}")
            }
            Error::ZeroVariance => write!(f, "cannot normalize a zero-variance sequence"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

pub(crate) fn shape_mismatch(context: impl Into<String>) -> Error {
    Error::ShapeMismatch {
        context: context.into(),
    }
}
