use chain_core::ChainError;
use thiserror::Error;

use crate::JumpKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("{kind:?} jump has weight {weight:e}; the conditional state is undefined")]
    ImpossibleJump { kind: JumpKind, weight: f64 },
    #[error("{kind:?} rate {rate:e} is negative")]
    NegativeRate { kind: JumpKind, rate: f64 },
    #[error("jump probability per step {0} exceeds 0.1; reduce dt")]
    StepTooLarge(f64),
    #[error("covariance invariant violated: {0}")]
    Invariant(String),
    #[error("need at least {needed} ticks per record, found {found}")]
    InsufficientTicks { needed: usize, found: usize },
    #[error("no samples to analyse")]
    Empty,
    #[error("invalid argument: {0}")]
    Domain(String),
}
