use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("harmonic term (rho^2) cannot be mixed perturbatively; absorb it through derive_scales")]
    HarmonicTerm,

    #[error("basis truncation n_max={n_max} too small for rho^{power} (need at least {required})")]
    Truncation {
        n_max: usize,
        power: usize,
        required: usize,
    },

    #[error("kernel order error: {0}")]
    Order(String),

    #[error("convergence failure in {context}: difference {difference:e} exceeds tolerance {tolerance:e}")]
    Convergence {
        context: String,
        difference: f64,
        tolerance: f64,
    },

    #[error("negative spectral weight {value:e} at k={k} exceeds clipping tolerance")]
    Negativity { k: f64, value: f64 },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
