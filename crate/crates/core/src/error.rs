use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rank-2 reduction invalid: qudit support has dimension {0}")]
    RankReduction(usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("impossible outcome ({m}, {n}): probability is zero")]
    ImpossibleOutcome { m: usize, n: usize },
    #[error("tail not converged: accumulated probability {accumulated} after m+n <= {cap}")]
    TailNotConverged { accumulated: f64, cap: usize },
    #[error("degenerate target: success probability {0} must lie strictly inside (0, 1)")]
    DegenerateTarget(f64),
    #[error("root bracket failure: {0}")]
    RootBracket(String),
    #[error("truncation insufficient: {0}")]
    Truncation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
