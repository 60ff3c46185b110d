use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension must be positive (got {rows}x{cols})")]
    EmptyDimension { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is ill-conditioned (condition number {condition:.3e} exceeds {cap:.1e})")]
    IllConditioned { condition: f64, cap: f64 },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("probability distribution is not normalized (sum {sum})")]
    NotNormalized { sum: f64 },

    #[error("bit sequence of length {len} is not a multiple of {bits_per_symbol} bits per symbol")]
    BitLength { len: usize, bits_per_symbol: u32 },

    #[error("unsupported constellation with {0} bits per symbol")]
    UnsupportedConstellation(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
