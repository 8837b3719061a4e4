use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("malformed group spec {0:?} (expected \"z:<d>\" or \"fp:<p>:<n>\")")]
    MalformedSpec(String),
    #[error("modulus {0} is not an odd prime")]
    BadModulus(u64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("element has {found} coordinates, group has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sets live in different groups ({0} vs {1})")]
    SpecMismatch(String, String),
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed rational {0:?}")]
    MalformedRatio(String),
    #[error("set of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("subset is not contained in the ambient set")]
    NotSubset,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("structural check failed: {0}")]
    CheckFailed(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}
