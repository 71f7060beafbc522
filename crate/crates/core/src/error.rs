use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace {trace} differs from 1 beyond tolerance")]
    NotUnitTrace { trace: f64 },

    #[error("eigenvalue {value:e} is negative beyond tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("argument has weight {magnitude:e} on the kernel of the mean superoperator")]
    KernelSupport { magnitude: f64 },

    #[error("unknown function identifier `{0}` (expected wy, sld or wyd:<alpha>)")]
    UnknownFunction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for violations of the density-matrix contract (Hermiticity,
    /// trace, positivity), as opposed to malformed input.
    pub fn is_state_invariant(&self) -> bool {
        matches!(self, Error::NotHermitian { .. } | Error::NotUnitTrace { .. } | Error::NegativeEigenvalue { .. })
    }
}
