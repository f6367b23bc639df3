//! Error type shared by the whole engine.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong inside the engine.
///
/// Variants are coarse on purpose: callers branch on the kind, humans
/// read the message. The `context` strings name the operation that
/// failed (e.g. `"conv1d forward"`), the `detail` strings say what was
/// wrong with the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Tensor extents do not line up with what the operation requires.
    ShapeMismatch { context: &'static str, detail: String },
    /// An argument is structurally valid but semantically out of range.
    InvalidArgument { context: &'static str, detail: String },
    /// Input data is degenerate for the requested transform
    /// (constant window, class too small to interpolate, ...).
    Degenerate { context: &'static str, detail: String },
    /// A computed quantity stopped being finite. The message names the
    /// first offending term so training failures are diagnosable.
    NonFinite { context: &'static str, detail: String },
    /// A record id was not found where the operation required it.
    UnknownRecord { record_id: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { context, detail } => {
                write!(f, "shape mismatch in {context}: {detail}")
            }
            Error::InvalidArgument { context, detail } => {
                write!(f, "invalid argument in {context}: {detail}")
            }
            Error::Degenerate { context, detail } => {
                write!(f, "degenerate input in {context}: {detail}")
            }
            Error::NonFinite { context, detail } => {
                write!(f, "non-finite value in {context}: {detail}")
            }
            Error::UnknownRecord { record_id } => {
                write!(f, "record id not present in any known split: {record_id}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn shape(context: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch { context, detail: detail.into() }
    }

    pub fn invalid(context: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidArgument { context, detail: detail.into() }
    }

    pub fn degenerate(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Degenerate { context, detail: detail.into() }
    }

    pub fn non_finite(context: &'static str, detail: impl Into<String>) -> Self {
        Error::NonFinite { context, detail: detail.into() }
    }
}
