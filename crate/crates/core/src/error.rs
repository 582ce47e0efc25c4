use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("not Q-factorial: {0}")]
    NotQFactorial(String),
    #[error("not Q-Cartier: {0}")]
    NotQCartier(String),
    #[error("not nef: {0}")]
    NotNef(String),
    #[error("ray outside the support of the fan: {0}")]
    OutsideSupport(String),
    #[error("genericity failure: {0}")]
    Genericity(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unexpected stratum: {0}")]
    Stratum(String),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
