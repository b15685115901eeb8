//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by dataset construction, fitting and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains a non-finite value (NaN or infinity)")]
    NonFiniteInput,

    #[error("column {0} has zero sample variance and cannot be standardized")]
    ConstantColumn(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sigma must be strictly positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("the alternative loss form is undefined at gamma = 0")]
    GammaZero,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rescaling requires strictly positive weights; coordinate {0} has weight 0")]
    ZeroWeightInRescaling(usize),

    #[error("scale update degenerated: all observations were down-weighted to outliers")]
    DegenerateScale,

    #[error("sample size {0} is too small (need n >= 3 for log log n)")]
    InvalidSampleSize(usize),

    #[error("a support coordinate of the true coefficient vector is zero")]
    ZeroTrueCoefficient,

    #[error("median absolute deviation of the sample is zero")]
    DegenerateMad,

    #[error("trimming left no residuals to average")]
    EmptyAfterTrim,

    #[error("p = {0} is too small for the requested coefficient pattern")]
    PTooSmall(usize),

    #[error("singular system in {0}")]
    SingularSystem(&'static str),

    #[error("response column '{0}' not found in the CSV header")]
    MissingResponseColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("scenario file error: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
