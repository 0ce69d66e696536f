use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(String),

    #[error("{label}: not self-adjoint, max |M - M^dag| = {residual:.3e}")]
    NotHermitian { label: String, residual: f64 },

    #[error("{label}: not idempotent, max |M^2 - M| = {residual:.3e}")]
    NotIdempotent { label: String, residual: f64 },

    #[error("context {context}: empty context")]
    EmptyContext { context: String },

    #[error("context {context}: members {i} and {j} do not annihilate, max |P_i P_j| = {residual:.3e}")]
    PairwiseProductNonzero {
        context: String,
        i: usize,
        j: usize,
        residual: f64,
    },

    #[error("context {context}: members do not sum to the identity, max |sum P - 1| = {residual:.3e}")]
    SumNotIdentity { context: String, residual: f64 },

    #[error("context {context}: vectors are not orthonormal, max |B^dag B - I| = {residual:.3e}")]
    NotOrthonormal { context: String, residual: f64 },

    #[error("context {context}: {found} vectors cannot span dimension {dim}")]
    NotComplete {
        context: String,
        found: usize,
        dim: usize,
    },

    #[error("collection contains no contexts")]
    EmptyCollection,

    #[error("context has {members} members, subset enumeration is capped at {cap}")]
    SubsetLimitExceeded { members: usize, cap: usize },

    #[error("witness search is capped at dimension {cap}, got {dim}")]
    SearchCapExceeded { dim: usize, cap: usize },

    #[error("irreducibility is undefined on a one-dimensional space")]
    AmbientDimOne,

    #[error("state vector has zero norm")]
    ZeroState,

    #[error("at least one {0} is required")]
    EmptyInput(&'static str),

    #[error("unknown context `{0}`")]
    UnknownContext(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that stem from a resource cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::SubsetLimitExceeded { .. } | Error::SearchCapExceeded { .. }
        )
    }
}
