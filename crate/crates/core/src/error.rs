use thiserror::Error;

use crate::io::config::ConfigError;

pub type Result<T, E = QnloError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QnloError {
    #[error(
        "truncation too small: n_max = {n_max} cannot hold |alpha| = {amplitude:.4} \
         (need |alpha|^2 + 6|alpha| <= n_max)"
    )]
    TruncationTooSmall { n_max: usize, amplitude: f64 },

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires delta = 0, got delta = {0}")]
    NonzeroDelta(f64),

    #[error("the RWA wave function needs a real coherent amplitude, got alpha = {re} + {im}i")]
    ComplexAlphaUnsupported { re: f64, im: f64 },

    #[error("hermitian eigensolve failed: {0}")]
    EigensolveFailure(String),

    #[error(
        "guard-band population {population:.3e} exceeds tail_tol {tol:.1e} at t = {t:.6}; \
         enlarge n_max"
    )]
    TruncationBreached { t: f64, population: f64, tol: f64 },

    #[error("step size underflow at t = {t:.6} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("input is not hermitian (max |M - M^dag| = {0:.3e})")]
    NonHermitianInput(f64),

    #[error("wigner grid too coarse: step {0} exceeds 0.25")]
    GridTooCoarse(f64),

    #[error("wigner grids do not share the same axes")]
    GridMismatch,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter {field}: {message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl QnloError {
    /// Process exit code used by the `qnlo` binary.
    pub fn exit_code(&self) -> u8 {
        match self {
            QnloError::Config(_) | QnloError::InvalidParameter { .. } | QnloError::InvalidGrid(_) => 2,
            QnloError::TruncationTooSmall { .. }
            | QnloError::TruncationBreached { .. }
            | QnloError::InvalidTruncation(_) => 3,
            QnloError::EigensolveFailure(_)
            | QnloError::StepSizeUnderflow { .. }
            | QnloError::NonHermitianInput(_) => 4,
            _ => 1,
        }
    }
}
