use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match grid with {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("point ({x}, {y}) lies outside the grid bounding box")]
    OutOfBounds { x: f64, y: f64 },

    #[error("slowness must be positive, found {value} at node {node}")]
    NonPositiveSlowness { node: usize, value: f64 },

    #[error("eikonal solve failed for source {source_index}: {reason}")]
    SourceSolve { source_index: usize, reason: String },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("slowness {value} below 1 in phantom {name}")]
    PhantomValue { name: String, value: f64 },

    #[error("unknown phantom preset `{name}`; available: {available}")]
    UnknownPreset { name: String, available: String },

    #[error("advection-diffusion system is singular or ill-conditioned (relative residual {residual:e}); increase epsilon")]
    IllConditioned { residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
