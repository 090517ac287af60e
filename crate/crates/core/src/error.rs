use thiserror::Error;

use crate::fock::TruncationSpec;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Young diagram {0:?}: parts must be positive and weakly decreasing")]
    InvalidDiagram(Vec<u32>),
    #[error("invalid index tuple {indices:?} for diagram {parts:?}: {reason}")]
    InvalidTuple {
        parts: Vec<u32>,
        indices: Vec<u32>,
        reason: &'static str,
    },
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("truncation mismatch: {0:?} vs {1:?}")]
    SpecMismatch(TruncationSpec, TruncationSpec),
    #[error("degree {degree} exceeds truncation degree {max_degree}")]
    DegreeOverflow { degree: usize, max_degree: usize },
    #[error("index {index} exceeds dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not unitary (max residual {0:e})")]
    NotUnitary(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
