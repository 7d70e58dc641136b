use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the library. Numeric payloads are stored as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numeric failure: {message} (condition number {condition:e})")]
    NumericFailure { message: String, condition: f64 },

    #[error("chart out of range{}: residual {residual:e} after {iterations} iterations ({reason})",
        .t.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    ChartOutOfRange {
        t: Option<f64>,
        reason: String,
        residual: f64,
        iterations: usize,
        last_iterate: Vec<f64>,
    },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }

    /// Attach the path parameter at which a chart failure happened.
    pub fn at_t(self, at: f64) -> Self {
        match self {
            Error::ChartOutOfRange {
                reason,
                residual,
                iterations,
                last_iterate,
                ..
            } => Error::ChartOutOfRange {
                t: Some(at),
                reason,
                residual,
                iterations,
                last_iterate,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let text = e.to_string();
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: text.strip_suffix(&suffix).unwrap_or(&text).to_string(),
        }
    }
}
