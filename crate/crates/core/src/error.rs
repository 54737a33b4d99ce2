use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is too large (must be below 65536)")]
    PrimeTooLarge(u64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("group order {order} exceeds the subgroup enumeration bound {bound}")]
    OrderBound { order: usize, bound: usize },
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("map is not injective")]
    NotInjective,
    #[error("map is not surjective")]
    NotSurjective,
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("q = {q} is not a power of p = {p} (need q >= 2)")]
    NotPowerOfP { q: usize, p: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
