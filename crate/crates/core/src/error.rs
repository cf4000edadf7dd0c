use alloc::string::String;

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("regime mismatch: H = {hurst}, q = {order} is not in the {expected} regime")]
    Regime {
        expected: &'static str,
        hurst: f64,
        order: u32,
    },

    #[error("series diverges for H = {hurst}, q = {order}")]
    Divergent { hurst: f64, order: u32 },

    #[error("{what} = {value} exceeds the supported maximum {max}")]
    Size {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("circulant eigenvalue {index} is {value:e}, below the tolerance -{tolerance:e}")]
    NegativeEigenvalue {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("covariance matrix is not positive definite at pivot {index}")]
    NotPositiveDefinite { index: usize },

    #[error("grid mismatch: expected level {expected}, found level {found}")]
    GridMismatch { expected: u32, found: u32 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("cannot parse weight spec `{0}`")]
    WeightSpec(String),
}

pub type Result<T> = core::result::Result<T, Error>;
