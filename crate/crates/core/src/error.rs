use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("information matrix is singular: det = {det:e} below threshold {threshold:e}")]
    SingularInformation { det: f64, threshold: f64 },

    #[error("resource split beta = {beta} is outside (0, 1)")]
    DegenerateSplit { beta: f64 },

    #[error("holevo minimization did not converge: best = {best}, restart spread = {spread:e}")]
    OptimizerNotConverged { best: f64, spread: f64 },

    #[error("quadrature did not converge: relative change {change:e} at {nodes} nodes")]
    QuadratureNotConverged { change: f64, nodes: usize },

    #[error("posterior normalizer underflowed ({0})")]
    DegeneratePosterior(String),

    #[error("invalid prior width {0}: must be positive and finite")]
    InvalidPrior(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
