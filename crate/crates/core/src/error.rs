use thiserror::Error;

/// Failures surfaced by the numerics kernel and the physics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("kernel is not one-dimensional: two smallest pivots {smallest:e} and {second:e} below {threshold:e}")]
    KernelDimension {
        smallest: f64,
        second: f64,
        threshold: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what}: {value:e} is below the threshold {threshold:e}")]
    BelowThreshold {
        what: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("Hilbert-space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("linearly unstable: max Re(λ) = {max_re:e}")]
    Unstable { max_re: f64 },

    #[error("{matrix} is not Hermitian: deviation {deviation:e}")]
    NonHermitian {
        matrix: &'static str,
        deviation: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
