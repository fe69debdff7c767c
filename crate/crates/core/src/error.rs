use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid ring: {0}")]
    Semantic(String),

    #[error("ring has {size} elements, above the limit of {limit} (pass an override to build it anyway)")]
    SizeGuard { size: u64, limit: u64 },

    #[error("graph would need more than {limit} edges")]
    MemoryBudget { limit: u64 },

    #[error("element id {id} out of range for a ring of size {size}")]
    OutOfRange { id: u64, size: u64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("seed set is empty")]
    EmptySeed,

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
