use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The support function vanishes in some direction, so the body has empty
    /// interior and its polar is unbounded.
    #[error("degenerate direction: support function is zero")]
    DegenerateDirection,

    #[error("tabulated body has no Lipschitz bound")]
    MissingLipschitz,

    #[error("operation not supported for this body representation: {0}")]
    Unsupported(&'static str),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("quadrature failed to reach tolerance (estimated relative error {rel_error:e})")]
    Quadrature { rel_error: f64 },

    #[error("solver did not converge after {iterations} iterations (residuals {residuals:?})")]
    NoConvergence { iterations: usize, residuals: [f64; 2] },
}

impl Error {
    pub(crate) const fn domain(op: &'static str, detail: &'static str) -> Self {
        Error::Domain { op, detail }
    }
}
