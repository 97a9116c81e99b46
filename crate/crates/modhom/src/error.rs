use thiserror::Error;

/// Errors shared across the crate. Variants that represent a bounded search
/// giving up (rather than bad input) are distinguished so callers can map
/// them to a different exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph with {n} vertices exceeds the supported maximum of {max}")]
    TooManyVertices { n: usize, max: usize },

    #[error("sort labeling is invalid: {reason}")]
    InvalidSorts { reason: String },

    #[error("exactly one side of the pair carries sorts; both or neither required")]
    SortMismatch,

    #[error("pin tuples have different lengths ({left} vs {right})")]
    PinArityMismatch { left: usize, right: usize },

    #[error("pin tuples have different equality types")]
    EqualityTypeMismatch,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("target has an automorphism of order {p}; a p-rigid target is required")]
    NotPRigid { p: u64 },

    #[error("graph must be connected")]
    Disconnected,

    #[error("graph must be bipartite with explicit sorts")]
    NotBipartite,

    #[error("ground set of size {n} exceeds the partition-enumeration cap {cap}")]
    GroundSetTooLarge { n: usize, cap: usize },

    #[error("constraint arity mismatch: scope has {scope} positions, tuple has {tuple}")]
    ArityMismatch { scope: usize, tuple: usize },

    #[error("bounded search exhausted: {context}")]
    SearchExhausted { context: String },

    #[error("witness gadget does not define the claimed relation")]
    WitnessMismatch,

    #[error("constructed gadget failed oracle verification: {context}")]
    GadgetVerificationFailed { context: String },

    #[error("invalid Z-decomposition: {reason}")]
    InvalidDecomposition { reason: String },

    #[error("parameter {name} is zero modulo p; a unit is required")]
    ZeroParameter { name: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
