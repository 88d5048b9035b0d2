//! Process-level failure classification.
//!
//! Every command maps its errors onto three exit codes: 1 for a bad
//! invocation (flags, config file, argument ranges), 2 for unusable input
//! data or I/O trouble, and 3 for computations that hit a numerically
//! degenerate configuration. Success is 0.

use std::fmt;

#[derive(Debug)]
pub enum Failure {
    /// Bad invocation: exit code 1.
    Usage(String),
    /// Unreadable or invalid input data: exit code 2.
    Data(String),
    /// Degenerate computation: exit code 3.
    Degenerate(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Degenerate(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Degenerate(m) => f.write_str(m),
        }
    }
}

impl From<ajdn_core::Error> for Failure {
    fn from(e: ajdn_core::Error) -> Self {
        match e {
            ajdn_core::Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            ajdn_core::Error::InvalidData(_) => Failure::Data(e.to_string()),
            ajdn_core::Error::Degenerate(_) => Failure::Degenerate(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Shorthand used throughout the commands.
pub type CliResult<T> = Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn data(msg: impl Into<String>) -> Failure {
    Failure::Data(msg.into())
}
