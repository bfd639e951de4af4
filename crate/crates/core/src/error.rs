use thiserror::Error;

/// Errors raised by the estimators, tests and the simulation engine.
///
/// Row and column indices in error payloads are 1-based, matching the
/// time index `j = 1..n` and component index `i = 1..d`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("sample has {0} rows; at least 2 are required")]
    TooFewRows(usize),

    #[error("sample has {0} columns; at least 2 are required")]
    TooFewColumns(usize),

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("pseudo-observation at row {row}, column {col} is {value}; must lie in (0, 1]")]
    PseudoOutOfRange { row: usize, col: usize, value: f64 },

    #[error("dimension {0} is too small; d >= 2 is required")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("kernel argument {0} is negative")]
    NegativeArgument(f64),

    #[error("invalid bandwidth {0}; must be finite and >= 0")]
    InvalidBandwidth(f64),

    #[error("long-run variance {0:e} is not positive; the test is undefined for this sample")]
    DegenerateVariance(f64),

    #[error("significance level {0} is outside (0, 1)")]
    AlphaOutOfRange(f64),

    #[error("grid coordinate {coord}: n*u = {scaled} is not an integer")]
    GridViolation { coord: usize, scaled: f64 },

    #[error("prefix of length {0} has a constant component; Pearson correlation undefined")]
    ZeroVariancePrefix(usize),

    #[error("shape matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("shape parameter q = {0} is outside (-1, 1)")]
    ShapeOutOfRange(f64),

    #[error("{count} outliers requested, but only {available} positions are available")]
    TooManyOutliers { count: usize, available: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("csv output failed: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
