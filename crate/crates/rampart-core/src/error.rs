//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset validation, sampling, ranking, and metrics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset must have at least one row and one column, got {rows}x{cols}")]
    EmptyDataset { rows: usize, cols: usize },
    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in feature matrix at row {row}, col {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("non-finite value in {what} at index {index}")]
    NonFiniteValue { what: &'static str, index: usize },
    #[error("classification response must be 0 or 1, got {value} at index {index}")]
    NonBinaryLabel { index: usize, value: f64 },

    #[error("cannot draw {requested} items without replacement from {available}")]
    SubsampleTooLarge { requested: usize, available: usize },
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("subsample sizes must be at least 1, got n={n}, m={m}")]
    ZeroSubsample { n: usize, m: usize },
    #[error("pool must be sorted, duplicate-free and within 0..{n_features}")]
    InvalidPool { n_features: usize },

    #[error("{ranker} ranker requires a {expected} response")]
    TaskMismatch {
        ranker: &'static str,
        expected: &'static str,
    },
    #[error("p_correct must satisfy 0.5 < p <= 1, got {0}")]
    PCorrectOutOfRange(f64),
    #[error("feature {feature} is outside the truth table of length {len}")]
    UnknownFeature { feature: usize, len: usize },
    #[error("invalid ranker hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("minipatch budget must be at least 1")]
    ZeroBudget,
    #[error("no feature was ever sampled; averaged ranks are undefined")]
    NoSampledFeatures,
    #[error("k must satisfy 1 <= k <= {n_features}, got {k}")]
    KOutOfRange { k: usize, n_features: usize },
    #[error("total budget {total} is below the {iterations} halving iterations")]
    BudgetBelowIterations { total: usize, iterations: usize },
    #[error("schedule inconsistent with inputs: {0}")]
    ScheduleMismatch(String),

    #[error("ranked list contains duplicate ids")]
    DuplicateIds,
    #[error("ranked list of length {len} is shorter than k={k}")]
    ListTooShort { len: usize, k: usize },
    #[error("rho must lie strictly between 0 and 1, got {0}")]
    RhoOutOfRange(f64),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("true ranks are not tie-free within the top-{k}")]
    TiedTopK { k: usize },
    #[error("need at least two values to aggregate, got {0}")]
    TooFewTrials(usize),

    #[error("the coefficient ladder needs at least 10 features, got {0}")]
    TooFewFeatures(usize),
    #[error("transformed column {col} has zero empirical variance")]
    DegenerateColumn { col: usize },
    #[error("AR(1) correlation must satisfy 0 <= rho < 1, got {0}")]
    InvalidAr1Rho(f64),
    #[error("gamma must be positive, got {0}")]
    InvalidGamma(f64),

    #[error("csv row {line}: {msg}")]
    CsvRow { line: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
