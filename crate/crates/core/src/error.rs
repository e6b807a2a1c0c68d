use thiserror::Error;

/// Errors produced by covering construction and verification.
#[derive(Debug, Error)]
pub enum CoverError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation not supported for ambient `{0}`")]
    UnsupportedAmbient(&'static str),

    #[error("doubling factor must be > 1, got {0}")]
    InvalidDoublingFactor(f64),

    #[error(
        "suspension thickening must satisfy 1 < beta < gamma (beta = {beta}, gamma = {gamma})"
    )]
    InvalidBeta { beta: f64, gamma: f64 },

    #[error("gamma must be >= 2, got {0}")]
    GammaTooSmall(f64),

    #[error("0 is not a regular value of a monomial")]
    NotARegularValue,

    #[error("level |c| = {0} is outside (0, 1); the punctured base region is empty")]
    LevelOutsideRange(f64),

    #[error("branch undefined: base chart does not avoid the coordinate hyperplanes ({0})")]
    BranchUndefined(String),

    #[error("extension is not holomorphic at the requested point ({0})")]
    NotHolomorphic(String),

    #[error("sample region does not match the covering ambient: {0}")]
    RegionMismatch(String),

    #[error("no chart contains the point")]
    NoContainingChart,

    #[error("the chart intersection graph does not connect the two points")]
    Disconnected,

    #[error("unknown bound formula `{0}`")]
    UnknownBound(String),

    #[error("at least 3 usable points are needed for a fit, got {0}")]
    InsufficientPoints(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed covering file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, CoverError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CoverError {
    CoverError::InvalidParameter(msg.into())
}
