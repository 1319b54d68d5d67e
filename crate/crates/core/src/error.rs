use crate::C64;
use thiserror::Error;

/// Crate-wide error type. Variants map one-to-one onto the failure modes of
/// the public operations (and onto CLI exit codes).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations ({found} roots found)")]
    RootsNonConvergence {
        iterations: usize,
        found: usize,
        partial: Vec<C64>,
    },

    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("resonance: {0}")]
    Resonance(String),

    #[error("defective matrix (semi-simplicity required): {0}")]
    Defective(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("scan window exhausted: {0}")]
    Window(String),

    #[error("epsilon-expansion order condition violated: {0}")]
    OrderCondition(String),

    #[error("nonlinear solve failed: {0}")]
    SolveFailed(String),

    #[error("interpolation inconsistency: {0}")]
    Interpolation(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
