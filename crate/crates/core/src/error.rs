use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
///
/// Membership failures are not errors; they are reported through
/// [`crate::MembershipVerdict`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient count {found} does not match dimension {expected} of system {system}")]
    DimensionMismatch {
        system: String,
        expected: usize,
        found: usize,
    },
    #[error("system mismatch: expected {expected}, found {found}")]
    SystemMismatch { expected: String, found: String },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operation requires {expected}, got {found}")]
    WrongSystem { expected: String, found: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
