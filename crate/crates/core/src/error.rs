use thiserror::Error;

use crate::projective::ProjFlag;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: |det| = {det:e} below tolerance {tol:e}")]
    SingularMatrix { det: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("not proximal: top Jordan gap {gap:e}")]
    NotProximal { gap: f64 },

    /// The SVD attractor is not well defined; the flag from the computed
    /// decomposition is still returned.
    #[error("ambiguous SVD attractor: mu1 - mu2 = {gap:e}")]
    Ambiguous { gap: f64, flag: Box<ProjFlag> },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("resolution too low: only {pairs} sample pairs inside the region")]
    ResolutionTooLow { pairs: usize },

    #[error("not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("displacement {displacement} does not exceed required {required}")]
    LowDisplacement { displacement: f64, required: f64 },

    #[error("not lineal: {0}")]
    NotLineal(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("budget exhausted: {detail} (best margin {best_margin:e})")]
    BudgetExhausted { best_margin: f64, detail: String },

    #[error("family too small: {size} elements, need more than {required}")]
    FamilyTooSmall { size: usize, required: usize },

    #[error("schedule failure: {0}")]
    ScheduleFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
