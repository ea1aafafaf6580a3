//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("graph is not d-out regular")]
    NotRegular,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("semigroup size cap exceeded (cap {cap})")]
    SizeCapExceeded { cap: usize },

    #[error("map is not an element of the kernel")]
    NotInKernel,

    #[error("stability relation is discrete; no quotient exists")]
    DiscreteStability,

    #[error("stability congruence violated: {0}")]
    CongruenceViolation(String),

    #[error("supplied witness map does not have the claimed range")]
    NotARange,

    #[error("coloring search cap exceeded (cap {cap})")]
    SearchSpaceExceeded { cap: usize },

    #[error("report holds no synchronizing coloring")]
    NotFound,

    #[error("class distance {delta} out of range (max {max})")]
    BadDelta { delta: usize, max: usize },

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),

    #[error("floating-point input rejected; use exact p/q rationals: `{0}`")]
    FloatRejected(String),

    #[error("matrix is not a fixed point of X -> AXA*")]
    NotAFixedPoint,

    #[error("fixed point failed to decompose over class indicators: {0}")]
    DecompositionResidual(String),

    #[error("property violated: {0}")]
    PropertyViolated(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
