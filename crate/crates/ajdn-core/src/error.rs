//! Error type shared across the crate.

use alloc::string::String;
use thiserror::Error;

/// Failure modes of the detection pipeline.
///
/// The three variants deliberately mirror the three non-success exit codes of
/// the command-line frontend: bad arguments, bad data, and numerically
/// degenerate inputs discovered mid-computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range (wrong length, empty
    /// window, alpha not in (0,1), ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The input series itself is unusable (empty panel, non-finite values).
    #[error("invalid data: {0}")]
    InvalidData(String),
    /// The computation hit a degenerate configuration: zero local variance,
    /// a vanishing long-run-variance denominator, or similar.
    #[error("degenerate computation: {0}")]
    Degenerate(String),
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn data(msg: impl Into<String>) -> Error {
    Error::InvalidData(msg.into())
}

pub(crate) fn degenerate(msg: impl Into<String>) -> Error {
    Error::Degenerate(msg.into())
}
