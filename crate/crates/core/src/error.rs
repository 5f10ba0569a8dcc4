//! Error type shared by the geometry, structure and fibration layers.

use crate::dsl::EvalError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GeomError {
    #[error("evaluation domain error: {0}")]
    Domain(#[from] EvalError),
    #[error("singular metric while {0}")]
    SingularMetric(&'static str),
    #[error("requested jet order {requested} exceeds supported maximum {max}")]
    JetOrder { requested: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point lies outside the chart domain (axis {axis}, value {value})")]
    OutsideDomain { axis: usize, value: f64 },
    #[error("input is not horizontal: eta-component {0:.3e}")]
    NonHorizontal(f64),
    #[error("degenerate frame input: {0}")]
    DegenerateFrame(String),
    #[error("warping function `{name}` not bounded away from zero (min sampled |{name}| = {min:.3e})")]
    VanishingWarp { name: &'static str, min: f64 },
    #[error("base is not Hermitian: {0}")]
    NonHermitianBase(String),
    #[error("submersion cross-check requires constant base warping, max |grad f| = {0:.3e}")]
    NonConstantWarp(f64),
}

pub type GeomResult<T> = Result<T, GeomError>;
