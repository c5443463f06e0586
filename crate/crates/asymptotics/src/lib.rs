//! Closed-form results for the infinite uniform chain and the time scales at
//! which diffusive noise overtakes logarithmic fluctuations.

mod crossover;
mod infinite_chain;
pub mod special;

pub use crossover::{crossover_time, disorder_crossover, thermal_crossover, Crossover, DisorderCrossover};
pub use infinite_chain::{
    bulk_correlator, bulk_variance_asymptotic, bulk_variance_closed_form, localization_length, mean_current_infinite,
    sine_kernel_number_variance,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("2 pi D / J = {ratio} is not below 1/e: diffusion dominates at all times, no cross-over")]
    NoCrossing { ratio: f64 },
}
