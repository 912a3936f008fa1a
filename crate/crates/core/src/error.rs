use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate matrix: |det| = {det:e} cannot be normalized")]
    DegenerateMatrix { det: f64 },

    #[error("isometry of kind {kind} has no closed geodesic")]
    NotClosedGeodesic { kind: &'static str },

    #[error("exterior power index {k} out of range 0..={dim}")]
    IndexOutOfRange { k: usize, dim: usize },

    #[error("invalid hyperbolic splitting: {0}")]
    InvalidSplitting(String),

    #[error("identity check failed: {what} (residual {residual:e})")]
    IdentityViolation { what: &'static str, residual: f64 },

    #[error("orbit and Poincare data are inconsistent: {0}")]
    InconsistentOrbit(String),

    #[error("spectral parameter Im(lambda) = {im} does not exceed the entropy bound {entropy}")]
    Divergent { im: f64, entropy: f64 },

    #[error("census is incomplete: model `{model}` has no word-length lower bound")]
    IncompleteCensus { model: String },

    #[error("invalid group model: {0}")]
    InvalidModel(String),

    #[error("character does not kill the relator")]
    InconsistentLocalSystem,

    #[error("surface with Euler characteristic {chi} is outside the negative-curvature hypothesis")]
    HypothesisViolation { chi: i64 },

    #[error("unsupported local system for the Gysin computation: {0}")]
    UnsupportedLocalSystem(String),

    #[error("topological routes disagree: {0}")]
    RouteDisagreement(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
