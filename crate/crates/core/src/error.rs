use std::path::PathBuf;

/// Errors raised by the library. Indefiniteness and infeasibility are answers,
/// not errors, and are reported through result types instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("matrix is singular")]
    Singular,
    #[error("polynomial has a zero leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("leading homogeneous coefficient must be the constant 1")]
    LeadingCoefficient,
    #[error("basis of order {k} cannot represent entries of per-variable degree {degree}")]
    BasisTooSmall { k: usize, degree: usize },
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("realified PSD block of size {block} exceeds the solver limit {limit}; use export instead")]
    TooLarge { block: usize, limit: usize },
    #[error("SDPA format: {0}")]
    Sdpa(String),
    #[error("scalar formula needs n = 1, got n = {0}")]
    NotScalar(usize),
    #[error("scan result does not retain a surface")]
    NoSurface,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
