use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight (1-t)^{alpha} is not integrable on [0, 1]; need alpha > -1")]
    NonIntegrableWeight { alpha: f64 },

    #[error("finite-difference stencil leaves the domain")]
    StencilOutOfDomain,

    #[error("argument outside the function's domain: {0}")]
    DomainError(String),

    #[error("invalid root data: {0}")]
    InvalidRootData(String),

    #[error("point is not in the interior of the domain")]
    OutsideDomain,

    #[error("weighted Bergman space is trivial at lambda = {lambda} (threshold lambda0 = {lambda0})")]
    TrivialSpace { lambda: f64, lambda0: f64 },

    #[error("kernel tail bound needs truncation degree {needed} > cap {cap}")]
    TruncationInsufficient { needed: usize, cap: usize },

    #[error("projective point has a zero representative")]
    InvalidProjectivePoint,

    #[error("quadrature failed: {0}")]
    IntegrationError(String),

    #[error("operators live in different contexts ({left} vs {right})")]
    ContextMismatch { left: usize, right: usize },

    #[error("operation not available for {0}")]
    UnsupportedModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
