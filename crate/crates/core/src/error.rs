use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("map is not trace preserving (completeness residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },
    #[error("map is not completely positive (Choi minimum eigenvalue {min_eig:.3e})")]
    NotCP { min_eig: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("invalid rank: {0}")]
    BadRank(String),
    #[error("matrix is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },
    #[error("rank mismatch: state has rank {state_rank}, isometry has {cols} columns")]
    RankMismatch { state_rank: usize, cols: usize },
    #[error("state is pure; a mixed state is required")]
    PureState,
    #[error("invalid Gaussian channel parameters: {0}")]
    InvalidParams(String),
    #[error("parameters do not describe a one-mode channel (s_A = {s_a}, s_B = {s_b})")]
    NotOneMode { s_a: usize, s_b: usize },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("numerical inconsistency in {what}: deviation {deviation:.3e}")]
    Inconsistent { what: &'static str, deviation: f64 },
}

impl Error {
    pub(crate) fn dims(expected: impl core::fmt::Display, got: impl core::fmt::Display) -> Self {
        use alloc::string::ToString;
        Error::DimensionMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
