use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("singular kernel: {0}")]
    SingularKernel(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
