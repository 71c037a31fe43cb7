use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("number of subdivisions per side must be at least 1")]
    ZeroSubdivisions,

    #[error("mesh is not a structured square mesh")]
    NotStructured,

    #[error("triangle {index} is degenerate (signed area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("point {point:?} lies outside the closed reference triangle")]
    OutsideReferenceTriangle { point: [f64; 3] },

    #[error("no quadrature rule exact to degree {0}")]
    UnsupportedQuadratureDegree(usize),

    #[error("point ({x}, {y}) is not on the boundary of the square")]
    NotOnBoundary { x: f64, y: f64 },

    #[error("incompatible inputs: {0}")]
    Mismatch(String),

    #[error("previous iterate violates the Dirichlet trace at dof {dof}: expected {expected}, found {found}")]
    TraceViolation { dof: usize, expected: f64, found: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("relative residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("fine mesh with {fine} subdivisions is not the uniform refinement of a mesh with {coarse}")]
    NotNested { coarse: usize, fine: usize },

    #[error("error value {value} at position {index} must be positive and finite")]
    NonPositiveError { index: usize, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("study failed at n_div = {n_div}: {reason}")]
    StudyFailed { n_div: usize, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
