use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("basis dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operator is not Hermitian: max |H - H^dagger| = {residual:e} > {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid involution: {0}")]
    InvalidInvolution(String),

    #[error("antiunitary check failed: {0}")]
    Antiunitary(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigensolver failure: {0}")]
    Solver(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
