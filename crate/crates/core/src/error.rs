use thiserror::Error;

use crate::kernel::ExprError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("tensors live on different charts")]
    ChartMismatch,
    #[error("slot {slot} is invalid for a rank ({upper},{lower}) tensor")]
    InvalidSlot { slot: usize, upper: usize, lower: usize },
    #[error("expected a rank ({want_upper},{want_lower}) tensor, got ({upper},{lower})")]
    RankMismatch { want_upper: usize, want_lower: usize, upper: usize, lower: usize },
    #[error("component count {got} does not match dimension^rank = {want}")]
    ComponentCount { want: usize, got: usize },
    #[error("metric is singular (determinant is the zero expression)")]
    SingularMetric,
    #[error("metric is not symmetric: g[{0}][{1}] != g[{1}][{0}]")]
    AsymmetricMetric(usize, usize),
    #[error("plane spanned by the two vectors is degenerate")]
    DegeneratePlane,
    #[error("almost contact structures need odd dimension, got {0}")]
    EvenDimension(usize),
    #[error("dimension {0} is too small for this operation")]
    DimensionTooSmall(usize),
    #[error("warping constant must be nonzero")]
    ZeroWarping,
    #[error("factor is not Kähler: {0}")]
    NotKahler(String),
    #[error("{0} must be constant for an eta-Ricci soliton")]
    NonconstantCoefficient(&'static str),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
