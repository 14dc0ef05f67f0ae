use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported rho {0} (closed forms exist for 1 and 2 only)")]
    UnsupportedRho(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not converge after {0} subdivisions")]
    Quadrature(usize),
    #[error("problem too large for the exact solver: {size} atoms (cap {cap})")]
    TooLarge { size: usize, cap: usize },
    #[error("budget cap reached at step {step}: theta_d = {theta_d:.6e} > epsilon = {epsilon:.6e}")]
    BudgetExhausted { step: usize, theta_d: f64, epsilon: f64 },
    #[error("serialization: {0}")]
    Serde(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_rho(rho: u32) -> Result<()> {
    if rho == 1 || rho == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedRho(rho as f64))
    }
}
