use thiserror::Error;

/// Errors raised by the numerical and construction routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("block {block} has size zero")]
    EmptyBlock { block: usize },

    #[error("expected at least one block")]
    NoBlocks,

    #[error("coupling table must be {expected}x{expected}, got a row of length {found}")]
    CouplingShape { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense expansion of size {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("eigenvalue iteration did not converge after {iterations} steps")]
    NotConverged { iterations: usize },

    #[error(
        "ill-conditioned rank decision at eigenvalue {eigenvalue}: {detail}; \
         perturb the input exactly (e.g. rational entries) and retry"
    )]
    IllConditioned { eigenvalue: String, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not an eigenpair: residual {residual:e} exceeds {tolerance:e}")]
    NotAnEigenpair { residual: f64, tolerance: f64 },

    #[error("integration diverged at step {step}")]
    Divergence { step: usize },
}

impl Error {
    /// True for failures of an iterative or rank-revealing kernel, as opposed
    /// to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::IllConditioned { .. } | Error::Divergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
