use chain_core::{ChainError, Complex64};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentsError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("drift matrix has eigenvalue {0} outside the open left half-plane")]
    NotHurwitz(Complex64),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("stationary current {0:e} vanishes; jump-dressed quantities are undefined")]
    ZeroCurrent(f64),
    #[error("trace that must be real has imaginary part {imag:e} (real part {real:e})")]
    ImaginaryTrace { real: f64, imag: f64 },
    #[error("bond {bond} out of range 1..={max}")]
    BadBond { bond: usize, max: usize },
    #[error("times must be finite, non-negative and increasing")]
    BadTimes,
    #[error("invalid argument: {0}")]
    Domain(String),
}
