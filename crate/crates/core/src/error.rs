use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shape or dimension problems between matrices, graphs and labels.
    #[error("structural error: {0}")]
    Structure(String),

    /// A single adjacency entry breaks a graph invariant.
    #[error("graph {graph}: entry ({row}, {col}) {problem}")]
    InvalidEntry {
        graph: usize,
        row: usize,
        col: usize,
        problem: String,
    },

    #[error("modality weights {weights:?} sum to {sum}, expected 1")]
    WeightSum { weights: Vec<f64>, sum: f64 },

    #[error("modality weight {index} is {weight}, must be finite and non-negative")]
    InvalidWeight { index: usize, weight: f64 },

    /// The Katz series diverges: alpha times the spectral radius is not below one.
    #[error("decay alpha = {alpha} is invalid for spectral radius {rho}: alpha * rho = {} must be < 1", alpha * rho)]
    KatzValidity { alpha: f64, rho: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A clustering score is not defined for the given labels.
    #[error("undefined score: {0}")]
    UndefinedScore(String),

    #[error("scenario generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
