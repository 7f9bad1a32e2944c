// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the engine.
///
/// Everything except [`Error::Internal`] and [`Error::PruningFailed`] is a
/// usage error: the caller handed in arguments outside an operation's domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// A real parameter fell outside its admissible interval.
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    /// An enumeration or memory guard would be exceeded.
    GuardExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
    InvalidParameter(String),
    /// Pruning left too few good messages; the code should be resampled
    /// with a different seed.
    PruningFailed {
        kept_messages: usize,
        required: usize,
    },
    Internal(&'static str),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::PruningFailed { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::OutOfDomain {
                name,
                value,
                domain,
            } => write!(f, "{name} = {value} is outside {domain}"),
            Error::GuardExceeded {
                what,
                limit,
                requested,
            } => write!(f, "{what} limited to {limit}, requested {requested}"),
            Error::InvalidParameter(msg) => f.write_str(msg),
            Error::PruningFailed {
                kept_messages,
                required,
            } => write!(
                f,
                "pruning kept only {kept_messages} messages (need {required}); resample the code with another seed"
            ),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
