use thiserror::Error;

/// Errors raised by the exact-arithmetic kernels.
///
/// Most operations are total; errors only arise from shape mismatches,
/// ill-formed inputs, or resource guards.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),

    #[error("not a chain map: {0}")]
    InvalidChainMap(String),

    #[error("complex validation failed: {0}")]
    InvalidComplex(String),

    #[error("degree {degree} outside window [{min}, {max}]")]
    DegreeWindow { degree: i32, min: i32, max: i32 },

    #[error("z-truncation overflow: exponent {exponent} exceeds bound {bound}")]
    TruncationOverflow { exponent: usize, bound: usize },

    #[error("rank guard: computation would need rank {rank} > limit {limit}")]
    RankLimit { rank: usize, limit: usize },

    #[error("monodromy matrix is not invertible over {0}")]
    NonInvertibleMonodromy(String),

    #[error("tower depth {depth} too small: need at least {need}")]
    DepthTooSmall { depth: usize, need: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
