use thiserror::Error;

/// All the ways a computation or a load can fail.
///
/// Input validation is deliberately strict: every constructor and entry point
/// rejects out-of-range values up front so the numeric code never has to
/// defend against NaN or nonsense mid-formula.
#[derive(Debug, Error)]
pub enum Error {
    /// A value was rejected before any computation ran. The message names the
    /// offending field and the invariant it broke.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Structured text (the reference-table CSV) did not match the expected
    /// shape. Carries a 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A scenario JSON document was syntactically or semantically broken.
    /// For syntax errors the message includes serde's line/column position.
    #[error("scenario error: {0}")]
    Scenario(String),

    /// The requested built-in scenario does not exist.
    #[error("unknown preset `{0}` (expected one of: {1})")]
    UnknownPreset(String, String),

    /// A fit could not be performed on the given rows (degenerate regressors,
    /// empty bracket, non-positive ratios, ...).
    #[error("calibration failure: {0}")]
    Calibration(String),

    /// File-system failure while reading a scenario or writing outputs.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for the common "field X must ..." rejection.
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
