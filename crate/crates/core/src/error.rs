use thiserror::Error;

/// Errors raised by the library. Every variant carries a stable
/// machine-readable code (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singularity of {atom} at z = {re}{im:+}i")]
    Singularity { atom: String, re: f64, im: f64 },
    #[error("non-finite value at grid point {index} (theta = {theta})")]
    NonFinite { index: usize, theta: f64 },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "E_MALFORMED",
            Error::DomainMismatch(_) => "E_DOMAIN",
            Error::DimensionMismatch { .. } => "E_DIMENSION",
            Error::InvalidParameter(_) => "E_PARAM",
            Error::Singularity { .. } => "E_SINGULAR",
            Error::NonFinite { .. } => "E_NONFINITE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
