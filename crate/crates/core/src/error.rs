//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FwiError {
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("point ({x}, {z}) lies outside the domain")]
    OutOfDomain { x: f64, z: f64 },

    #[error("factorisation failed: matrix is singular near row {row}")]
    SingularFactorization { row: usize },

    #[error("line search failed: {0}")]
    LineSearchFailure(String),

    #[error("direction is not a descent direction (g.d = {0:.3e})")]
    NotDescent(f64),

    #[error("conjugate gradient breakdown: p^T H p = {0:.3e} <= 0")]
    CgBreakdown(f64),

    #[error("missing cached fields: {0}")]
    MissingCache(String),

    #[error("lower-level solve failed for training model {model}: {source}")]
    LowerLevel {
        model: usize,
        #[source]
        source: Box<FwiError>,
    },

    #[error("frequency group {group}: {source}")]
    Continuation {
        group: usize,
        #[source]
        source: Box<FwiError>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid metric input: {0}")]
    Metric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FwiError>;
