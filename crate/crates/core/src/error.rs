use std::fmt;

use thiserror::Error;

/// Where in an input a diagnostic points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    /// 1-based line of a JSON-lines stream.
    Line(usize),
    /// Byte offset into a text value or stream.
    Offset(usize),
    /// Citation key of a BibTeX entry.
    Entry(String),
    /// Citation key plus the byte offset inside the stream.
    EntryOffset(String, usize),
    /// Record identifier.
    Record(String),
    None,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Offset(n) => write!(f, "byte {n}"),
            Location::Entry(key) => write!(f, "entry `{key}`"),
            Location::EntryOffset(key, n) => write!(f, "entry `{key}` (byte {n})"),
            Location::Record(id) => write!(f, "record `{id}`"),
            Location::None => f.write_str("input"),
        }
    }
}

/// A non-fatal message produced while reading input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn new(location: Location, message: impl Into<String>) -> Self {
        Self {
            location,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid name: {0}")]
    InvalidName(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error("validation error at {location}, field `{field}`: {message}")]
    Validation {
        location: Location,
        field: String,
        message: String,
    },

    #[error("author set is empty")]
    EmptyAuthorSet,

    #[error("gender `{0}` is not one of the configured census categories")]
    UnknownGender(String),

    #[error("gender census needs at least two categories, got {0}")]
    DegenerateCensus(usize),

    #[error("author {index} has no career start")]
    MissingCareerData { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(location: Location, message: impl Into<String>) -> Self {
        Error::Parse {
            location,
            message: message.into(),
        }
    }

    pub fn validation(
        location: Location,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Validation {
            location,
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 1 for unreadable or malformed input, 2 for
    /// invariant and configuration violations, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 1,
            Error::Validation { .. } | Error::InvalidName(_) | Error::InvalidConfig(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
