use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid step function: {0}")]
    InvalidStep(String),
    #[error("unsupported Lorentz regime: q = {q} > p = {p}")]
    UnsupportedRegime { p: f64, q: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("construction inapplicable: {0}")]
    Inapplicable(String),
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, SnumError>;
