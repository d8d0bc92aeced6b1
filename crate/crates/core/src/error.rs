use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ladder spec: {0}")]
    InvalidSpec(String),
    #[error("unsupported reflection: {0}")]
    UnsupportedReflection(String),
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("sweep too large: {count} cycles exceed the limit of {limit}")]
    SweepTooLarge { count: usize, limit: usize },
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("no convergence: {message}")]
    Convergence { message: String, residuals: Vec<f64> },
    #[error("operators do not commute: {0}")]
    NonCommuting(String),
    #[error("labeling failed: {0}")]
    Labeling(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the size and count limits that protect memory and runtime.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard(_) | Error::SweepTooLarge { .. })
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}
