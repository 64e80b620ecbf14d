use thiserror::Error;

use crate::solver::LassoFit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate dictionary: {0}")]
    DegenerateDictionary(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("condition violated: {0}")]
    ConditionViolated(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Coordinate descent ran out of sweeps; the partial fit is attached.
    #[error(
        "coordinate descent did not converge after {} sweeps (kkt residual {:e})",
        .0.sweeps,
        .0.kkt_residual
    )]
    NonConvergence(Box<LassoFit>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
