use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit exceeded: dimension {requested} is above the limit {limit}")]
    SizeLimit { requested: usize, limit: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("party index {party} out of range for {parties} parties")]
    IndexError { party: usize, parties: usize },
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("vector is not in the range (residual {residual:.3e})")]
    NotInRange { residual: f64 },
    #[error("state is not supported on the symmetric subspace (residual {residual:.3e})")]
    NotSymmetricSupport { residual: f64 },
    #[error("vector is not normalized (norm {norm})")]
    NormError { norm: f64 },
    #[error("rank {rank} exceeds the maximum {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no symmetric product vector in range (best overlap {best_overlap:.12})")]
    NotFound { best_overlap: f64 },
    #[error("alternating projection did not converge after {iterations} iterations (PT residual {ppt_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        ppt_residual: f64,
    },
    #[error("certificate extraction failed at term {step}: best overlap {best_overlap:.12}")]
    ExtractionFailed { step: usize, best_overlap: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
