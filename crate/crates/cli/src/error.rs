use std::io;
use std::path::PathBuf;

use experiments::ExperimentError;
use thiserror::Error;

pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("invalid document {path}: {source}")]
    Document { path: PathBuf, source: serde_json::Error },
    #[error("{0} already exists; pass --force to overwrite")]
    Collision(PathBuf),
    #[error("{failed} of {total} acceptance checks failed")]
    ChecksFailed { failed: usize, total: usize },
    #[error(transparent)]
    Chain(#[from] chain_core::ChainError),
    #[error(transparent)]
    Transport(#[from] landauer::LandauerError),
    #[error(transparent)]
    Optimizer(#[from] optimizer::OptimizerError),
    #[error(transparent)]
    Trajectory(#[from] trajectories::TrajectoryError),
    #[error(transparent)]
    Moments(#[from] moments::MomentsError),
    #[error(transparent)]
    Asymptotics(#[from] asymptotics::AsymptoticsError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Bad input or output layout is a usage error; everything the
    /// numerics reject is a domain error.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Read { .. } | Self::Document { .. } | Self::Collision(_) => EXIT_USAGE,
            Self::Experiment(
                ExperimentError::Config(_) | ExperimentError::OutputExists(_) | ExperimentError::Json(_),
            ) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}
