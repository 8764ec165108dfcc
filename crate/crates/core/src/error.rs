use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact arithmetic requested but exponent {0} is irrational")]
    MixedMode(String),

    #[error("no admissible beta index for {tuple:?} at scale j = {j} with C_d = {cd} (bounds [{lower}, {upper}])")]
    NotFound {
        tuple: Vec<i64>,
        j: u64,
        cd: u64,
        lower: String,
        upper: u128,
    },

    #[error("query range [{lo}, {hi}] leaves the seed window [{window_lo}, {window_hi}]")]
    WindowExceeded {
        lo: i64,
        hi: i64,
        window_lo: i64,
        window_hi: i64,
    },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("coverage failure: {0}")]
    Coverage(String),

    #[error("comparison undecided at {0} bits")]
    Undecided(u32),

    #[error("check failed: {0}")]
    Check(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
