use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SlabError>;

#[derive(Debug, Error)]
pub enum SlabError {
    #[error("degenerate simplex: Gram determinant {det:e} is below {tol:e}")]
    DegenerateSimplex { det: f64, tol: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("degenerate configuration sphere: squared radius {radius_sq:e}")]
    DegenerateConfig { radius_sq: f64 },

    #[error("annulus upper radius {upper} exceeds the resolvable frequency radius {nyquist}")]
    Range { upper: f64, nyquist: f64 },

    #[error("point {point:?} lies outside the padded domain of half-width {half_width}")]
    OutOfBox { point: Vec<f64>, half_width: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parameter error: {0}")]
    Param(String),

    #[error("scale sequence overflow: lambda {lambda} exceeds the admissible bound {bound}")]
    Overflow { lambda: f64, bound: f64 },

    #[error("configuration error in key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("invalid set file {path:?}: {message}")]
    SetFormat { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SlabError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        SlabError::Param(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        SlabError::Precondition(msg.into())
    }
}
