use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular (sigma_min / sigma_max = {ratio:e})")]
    SingularMatrix { ratio: f64 },

    #[error("{what} is not positive definite (lambda_min = {min_eigenvalue:e})")]
    NotPositiveDefinite {
        what: &'static str,
        min_eigenvalue: f64,
    },

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("constraint matrices are linearly dependent (gram sigma_min = {sigma_min:e})")]
    DependentConstraints { sigma_min: f64 },

    #[error("Newton matrix is singular (sigma_min / sigma_max = {ratio:e})")]
    SingularNewtonMatrix { ratio: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot normalise a zero vector")]
    ZeroVector,

    #[error("tomography error {error:e} exceeds the guaranteed bound {bound:e}")]
    TomographyFailure { error: f64, bound: f64 },

    #[error("no strictly feasible starting point: {0}")]
    NoFeasibleSeed(String),

    #[error("iterate is too far from the central path: d = {distance:e} > eta = {eta}")]
    PathDistanceViolation { distance: f64, eta: f64 },

    #[error("audit failure at iteration {iteration}: {clause}")]
    AuditFailure { iteration: usize, clause: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
