//! Quantum-jump trajectories of a boundary-driven chain in the Gaussian
//! (covariance) representation, and statistics of the resulting ticks.
//!
//! At full bias a tick is an emission into the right reservoir; at finite
//! bias it is a first passage of the net right-lead count. Between jumps the
//! conditional covariance follows a Riccati flow; each of the four boundary
//! jumps updates it in closed form. Two integrators are provided: fixed
//! Runge–Kutta steps with Bernoulli jump draws, and exact jump-time sampling
//! in the orbital representation of the pure state.

mod error;
mod simulate;
mod slater;
mod state;
mod stats;

pub use error::TrajectoryError;
pub use simulate::{
    ensemble_covariance, simulate_ensemble, simulate_spec, simulate_trajectory, Integrator, Stop, TickRecord,
    DEFAULT_REPROJECT_EVERY, MAX_STEP_PROBABILITY,
};
pub use slater::{Slater, WaitingTimeSampler};
pub use state::{apply_jump, jump_rates, no_jump_step, reproject, CovarianceState, JumpKind, RiccatiFlow};
pub use stats::{
    conditional_waiting_histogram, counting_statistics, fit_surmise, waiting_time_stats, wigner_dyson_fit,
    CountingRow, Histogram, PooledEstimate, Surmise, SurmiseFit, WaitingHistograms, WaitingRow, DEFAULT_DISCARD,
    HISTOGRAM_BINS, HISTOGRAM_RANGE,
};
