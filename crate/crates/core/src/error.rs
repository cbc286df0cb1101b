use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("empty input")]
    EmptyInput,
    #[error("function is not nonincreasing near t = {t}")]
    NotDecreasing { t: f64 },
    #[error("evaluation point {t} lies on a discontinuity")]
    AtSingularity { t: f64 },
    #[error("tail integral of psi(t)/t^2 diverges{}", detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default())]
    TailDivergent { detail: Option<String> },
    #[error("matrix is not hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("X - Y vanishes")]
    ZeroDifference,
    #[error("zero matrix")]
    ZeroMatrix,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("bad corpus spec: {0}")]
    BadSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidInput(msg.into())
    }
}
