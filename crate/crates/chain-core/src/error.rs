use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain needs at least one site")]
    NoSites,
    #[error("expected {expected} couplings for the given site count, got {got}")]
    CouplingCount { expected: usize, got: usize },
    #[error("coupling {index} must be positive and finite, got {value}")]
    BadCoupling { index: usize, value: f64 },
    #[error("boundary rate must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("{side} occupation must lie in [0, 1], got {value}")]
    BadOccupation { side: &'static str, value: f64 },
    #[error("entropy per tick must be finite and non-negative, got {0}")]
    BadEntropy(f64),
    #[error("both entropy and explicit occupations were given")]
    ConflictingBias,
    #[error("disorder width must be finite and non-negative, got {0}")]
    BadDisorderWidth(f64),
    #[error("coupling disorder width {width} would allow non-positive couplings (min coupling {min_coupling})")]
    DisorderTooStrong { width: f64, min_coupling: f64 },
    #[error("detuning vector has length {got}, chain has {expected} sites")]
    DetuningCount { expected: usize, got: usize },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}
