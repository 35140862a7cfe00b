use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty convex set")]
    EmptySet,
    #[error("boundary types differ: {0}")]
    BoundaryMismatch(String),
    #[error("constant atoms have no inverse")]
    NotInvertible,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("{0} is outside the atom's domain")]
    OutOfDomain(String),
    #[error("chain models differ")]
    ModelMismatch,
    #[error("invalid piecewise map: {0}")]
    InvalidMap(String),
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("map is not orientation-preserving")]
    NotOp,
    #[error("witness verification failed: {0}")]
    VerificationFailed(String),
    #[error("n = {0} exceeds the enumeration limit")]
    TooLarge(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
