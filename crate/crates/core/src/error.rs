use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::linalg::LinalgError;
use crate::model::ModelError;

/// Any failure raised while building or evolving a model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("invalid time grid: {0}")]
    Grid(&'static str),
}
