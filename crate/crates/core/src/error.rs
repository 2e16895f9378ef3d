use thiserror::Error;

use crate::algebra::Elem;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain size must be between 1 and 256, got {0}")]
    InvalidDomain(usize),
    #[error("arity must be at least 1")]
    NullaryOperation,
    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("element {elem} is outside the domain of size {size}")]
    ElementOutOfRange { elem: usize, size: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("operations are over different domains ({0} and {1})")]
    DomainMismatch(usize, usize),
    #[error("projection index {index} out of bounds for arity {arity}")]
    ProjectionIndex { index: usize, arity: usize },
    #[error("argument space {size}^{arity} is too large")]
    TooLarge { size: usize, arity: usize },
    #[error("not a semilattice: {0}")]
    NotSemilattice(String),
    #[error("{what} exceeded the limit of {limit}")]
    ResourceLimit { what: &'static str, limit: u64 },
    #[error("arity {arity} exceeds the clone table bound {bound}")]
    ArityBound { arity: usize, bound: usize },
    #[error("constant operations have degree 0 and no minimal decomposition")]
    ConstantFunction,
    #[error("functional dependence needs at least two operations, got {0}")]
    TooFewOperations(usize),
    #[error("coordinate {0} is covered by no member of the set system")]
    UncoveredCoordinate(usize),
    #[error("invalid meet term: {0}")]
    InvalidTerm(String),
    #[error("the semilattice has no {0} element")]
    MissingConstant(&'static str),
    #[error("constant {0} is not an identity or zero element of the semilattice")]
    ForeignConstant(Elem),
    #[error("witness verification failed: {0}")]
    VerificationFailed(String),
    #[error("unknown class id {0}")]
    UnknownClass(usize),
    #[error("the semilattice-fast strategy needs a clone between <meet> and <meet,0,1>")]
    StrategyUnavailable,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
