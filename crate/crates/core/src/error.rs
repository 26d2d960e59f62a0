use thiserror::Error;

/// Errors raised by the computational kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("maximizer hit the search boundary t_max = {t_max} (x = {x})")]
    BoundaryHit { x: f64, t_max: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("construction failed: attainment at (j = {j}, q = {q}) violates dominance {dominance}")]
    Construction { j: usize, q: usize, dominance: usize },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, GsError>;
