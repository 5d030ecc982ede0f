use thiserror::Error;

/// Errors produced by the geometry and experiment pipelines.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("point ({x}, {y}) is outside the open unit disk chart")]
    OutsideChart { x: f64, y: f64 },

    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),

    #[error("{what}: solver failed to converge, best residual {residual:e}")]
    SolverFailure { what: &'static str, residual: f64 },

    #[error("integration truncated at t = {achieved} (requested {requested})")]
    Truncated { achieved: f64, requested: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
