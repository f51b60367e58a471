use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parameter out of range: {name} = {value} ({constraint})")]
    Parameter {
        name: &'static str,
        value: f64,
        constraint: String,
    },

    #[error("spectral coefficients are not Hermitian (defect {defect:.3e}); cannot produce a real field")]
    NonHermitian { defect: f64 },

    #[error("singular Lamé symbol: c = 1")]
    SingularSymbol,

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("coefficient validation failed: {0}")]
    Validation(String),

    #[error("unsupported coefficient: {0}")]
    Unsupported(String),

    #[error("empty region")]
    EmptyRegion,

    #[error("zero field where a nonzero field is required")]
    ZeroField,

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("table format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, constraint: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            value,
            constraint: constraint.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
