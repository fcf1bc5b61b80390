use thiserror::Error;

/// Errors raised by the channel, representation and measure routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry count {found} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, found: usize },

    #[error("dimension {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("negative radicand {0:e} in a Kraus weight")]
    NegativeRadicand(f64),

    #[error("Kraus set is not complete (max deviation {0:e})")]
    IncompleteKraus(f64),

    #[error("G has no finite roots when alpha = 0")]
    NoFiniteRoots,

    #[error("channel is non-invertible at p = {0} (G(p) = 0)")]
    SingularBase(f64),

    #[error("h(alpha, p) vanishes at p = {0}")]
    NormalizerRoot(f64),

    #[error("no interior singular point: alpha_minus = {0} is not below 1")]
    NoInteriorSingularity(f64),

    #[error("invalid MUB pair {basis}:{first}:{second} for dimension {dim}")]
    InvalidPair {
        basis: usize,
        first: usize,
        second: usize,
        dim: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
