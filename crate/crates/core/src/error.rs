use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("not a Lorentz transformation: residual {residual:.3e} exceeds {tol:.3e}")]
    NotLorentz { residual: f64, tol: f64 },

    #[error("expected an element of SO0(n,1), found grade {0}")]
    NotOrthochronous(String),

    #[error("not a boost: {0}")]
    NotBoost(String),

    #[error("matrix is not skew-symmetric: |B + B^T| = {0:.3e}")]
    NotSkew(f64),

    #[error("matrix is not a proper rotation: {0}")]
    NotRotation(String),

    #[error("decomposition failed: reconstruction residual {residual:.3e} exceeds {tol:.3e}")]
    Reconstruction { residual: f64, tol: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-orthochronous image: time coordinate {0:.3e} is not positive")]
    TimeReversal(f64),

    #[error("root solver failed on [{lo}, {hi}] (f = {flo:.3e}, {fhi:.3e})")]
    RootSolver { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("singular configuration reached at t = {time}: lambda_min = {margin:.3e}")]
    SingularityApproach { time: f64, margin: f64 },

    #[error("head target leaves the reachable ball at t = {time}: |c| = {norm} >= L = {length}")]
    Unreachable { time: f64, norm: f64, length: f64 },

    #[error("too many segments for enumeration: {0} > 20")]
    TooManySegments(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
