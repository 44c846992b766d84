use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped loosely by cause so that front ends can map them to
/// exit codes: shape and precondition failures versus numerical failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix order {0} is odd; an even order 2p is required")]
    OddOrder(usize),

    #[error("matrix is empty")]
    Empty,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |a_ij - a_ji| = {deviation:e} at ({row}, {col})")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),

    #[error("matrix is not Hamiltonian (residual {0:e})")]
    NotHamiltonian(f64),

    #[error("matrix has a negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),

    #[error("direction matrix is not in the tangent space (residual {0:e})")]
    NotTangent(f64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("graph is not a tree")]
    NotATree,

    #[error("size {size} exceeds the enumeration guard {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix pattern does not represent the coupled graph")]
    PatternMismatch,

    #[error("{0}")]
    Rejected(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    /// True for failures that come from floating point computation rather
    /// than from the shape or structure of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite | Error::Singular | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
