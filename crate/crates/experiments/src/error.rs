use std::path::PathBuf;

use asymptotics::AsymptoticsError;
use chain_core::ChainError;
use landauer::LandauerError;
use moments::MomentsError;
use optimizer::OptimizerError;
use thiserror::Error;
use trajectories::TrajectoryError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("column {column} has {found} values, table has {expected} rows")]
    ColumnLength { column: String, expected: usize, found: usize },
    #[error("row has {found} values, table has {expected} columns")]
    RowLength { expected: usize, found: usize },
    #[error("{0} already exists; pass --force to overwrite")]
    OutputExists(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Transport(#[from] LandauerError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Moments(#[from] MomentsError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
}

impl ExperimentError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }
}
