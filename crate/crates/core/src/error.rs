//! Error type shared by every subsystem.

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no primitive direction")]
    ZeroVector,
    #[error("vector {0} is not primitive")]
    NotPrimitive(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("vertex index {index} out of range for {len} vertices")]
    VertexOutOfRange { index: usize, len: usize },
    #[error("order out of range: order {order} at vertex {vertex} with {nodes} nodes")]
    OrderOutOfRange { vertex: usize, order: u64, nodes: u64 },
    #[error("cut at vertex {0} does not point into the polygon")]
    CutNotInward(usize),
    #[error("ray from vertex {vertex} exits through vertex {hit} whose cut is not opposite")]
    IncompatibleCut { vertex: usize, hit: usize },
    #[error("ray from vertex {vertex} crosses the cut of vertex {other}")]
    RayCrossesCut { vertex: usize, other: usize },
    #[error("base is not a triangle ({0} vertices)")]
    NotATriangle(usize),
    #[error("corner {index} is not smooth (determinant {det})")]
    NonSmoothCorner { index: usize, det: String },
    #[error("invalid Markov configuration: {0}")]
    InvalidConfig(String),
    #[error("triple {0} does not solve the configured equation")]
    NotASolution(String),
    #[error("non-positive discriminant {0}")]
    NonPositiveDiscriminant(String),
    #[error("divisibility failure: {0}")]
    Divisibility(String),
    #[error("entries {0} and {1} are not coprime")]
    NotCoprime(String, String),
    #[error("classes are not balanced: residual {0}")]
    Unbalanced(String),
    #[error("vertex {0} is frozen")]
    FrozenMutation(usize),
    #[error("variables in set {set} diverge after round {round}: {values}")]
    SetDivergence { set: String, round: usize, values: String },
    #[error("non-integral cluster variable {0}")]
    NonIntegral(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("invalid base: {0}")]
    InvalidBase(String),
}

/// Result alias for [`Error`].
pub type Result<T> = std::result::Result<T, Error>;
