use thiserror::Error;

/// Errors produced by the kinematics, estimation and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A velocity is not strictly inside `(-c, c)`.
    #[error("velocity {value} is outside the open interval (-{bound}, {bound})")]
    OutOfRange { value: f64, bound: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Too few observations for the requested operation.
    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// The covariate carries no variation, so slope denominators vanish.
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// A fit that has no usable variance (two points, no known sigma^2).
    #[error("no variance available: {0}")]
    NoVariance(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Wraps an error with the 1-based data row it refers to.
    #[error("row {row}: {source}")]
    AtRow { row: usize, source: Box<Error> },
}

/// Coarse classification used to map errors onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Degenerate,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::OutOfRange { .. }
            | Error::NonFinite(_)
            | Error::InvalidParameter(_)
            | Error::NoVariance(_)
            | Error::Parse { .. } => ErrorKind::Validation,
            Error::InsufficientData { .. } | Error::DegenerateDesign(_) => ErrorKind::Degenerate,
            Error::Numeric(_) => ErrorKind::Numeric,
            Error::AtRow { source, .. } => source.kind(),
        }
    }

    pub(crate) fn at_row(self, row: usize) -> Self {
        Error::AtRow {
            row,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
