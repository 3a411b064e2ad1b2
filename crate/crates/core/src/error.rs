use thiserror::Error;

use crate::geometry::Domain;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point of dimension {found} given for a domain of dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("divergent integral: {detail} (offending exponent {exponent})")]
    DivergentIntegral { exponent: String, detail: String },

    #[error("index ({m}, {n}) is not square-integrable on {domain}")]
    NonIntegrableIndex { m: i64, n: i64, domain: Domain },

    #[error("{op} is not supported on {domain}")]
    UnsupportedDomain { op: &'static str, domain: Domain },

    #[error(
        "multiplier sequence has unbounded variation: partial sum {partial} exceeds cap {cap}"
    )]
    DivergentSequence { partial: f64, cap: f64 },

    #[error("closed form is not a rational multiple of a power of pi: {0}")]
    Irrational(String),

    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration error in `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
