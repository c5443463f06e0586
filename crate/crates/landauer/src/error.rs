use chain_core::ChainError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandauerError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("eigenvalues closer than {gap:e}; residue sums need a non-degenerate spectrum")]
    Degenerate { gap: f64 },
    #[error("eigenvalue {0} is not strictly dissipative")]
    NotDissipative(String),
    #[error("transmission {value} at energy {energy} exceeds 1")]
    TransmissionAboveOne { energy: f64, value: f64 },
    #[error("resolvent solve failed at energy {0}")]
    SingularResolvent(f64),
    #[error("residue sum left an imaginary part {imag:e} (real part {real:e})")]
    ImaginaryResidue { real: f64, imag: f64 },
    #[error("residue sum is dominated by round-off (value or error estimate {0:e})")]
    Cancellation(f64),
    #[error("quadrature reached error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("invalid argument: {0}")]
    Domain(String),
}
