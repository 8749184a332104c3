use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric: |M[{i}][{j}] - M[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("circulant vector is not symmetric at k = {k}: a[k] = {a_k}, a[n-k] = {a_nk}")]
    AsymmetricCirculant { k: usize, a_k: f64, a_nk: f64 },

    #[error("eigensolver did not converge for a {n}x{n} matrix")]
    NoConvergence { n: usize },

    #[error("signal value {value} at ({i}, {j}) is outside [0, 1]; Bernoulli noise is undefined")]
    SignalOutOfRange { i: usize, j: usize, value: f64 },

    #[error("unknown model `{0}` (expected affine, f0 or logit)")]
    UnknownModel(String),

    #[error("n = {n} is too small: {reason}")]
    TooSmall { n: usize, reason: &'static str },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
