use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Interval index is 1-based, matching `I_1..I_m`.
    #[error("partition interval I_{0} contains no samples")]
    EmptyInterval(usize),

    #[error("x = {0} lies outside [-1, 1]")]
    OutOfDomain(f64),

    /// An input file parsed but its contents are unusable.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("sample set carries no outlier flags")]
    MissingFlags,

    #[error("need at least {needed} distinct nodes, got {got}")]
    DegenerateNodes { needed: usize, got: usize },

    #[error("noise {value} exceeds sigma = {sigma}")]
    NoiseTooLarge { value: f64, sigma: f64 },

    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),

    #[error("{0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedInput(msg.into())
}
