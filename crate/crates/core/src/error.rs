use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite integrand value at {0}")]
    NonFinite(Complex64),
    #[error("integrand does not decay: {0}")]
    Divergence(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("outside asymptotic regime: {0}")]
    OutsideAsymptoticRegime(String),
    #[error("outside convergence sector: {0}")]
    OutsideConvergenceSector(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("φ has no zeros for m=1")]
    NoZeros,
    #[error("io: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Domain,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::Domain(_)
            | Error::NoZeros
            | Error::OutsideAsymptoticRegime(_)
            | Error::OutsideConvergenceSector(_) => ErrorClass::Domain,
            Error::NonFinite(_)
            | Error::Divergence(_)
            | Error::NonConvergence(_)
            | Error::Consistency(_) => ErrorClass::Numerical,
            Error::Io(_) | Error::Format(_) => ErrorClass::Io,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
