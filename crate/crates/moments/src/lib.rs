//! Exact moments of the boundary-driven chain from its one-body covariance
//! `C_ij = <c_i^dagger c_j>`.
//!
//! The covariance obeys `dC/dt = K C + C K^dagger + P`. The steady state
//! solves a Lyapunov equation; the counting variance at the right lead and
//! across any bond follows from propagating jump-dressed covariances with `K`.
//! [`dense`] holds a many-body Lindblad oracle for very short chains.

pub mod dense;
mod error;
mod fcs;
mod lyapunov;
mod model;
mod propagator;

pub use error::MomentsError;
pub use fcs::{levitov_lesovik_cumulants, levitov_lesovik_log_mgf};
pub use lyapunov::{lyapunov_solve, Lyapunov};
pub use model::{
    diffusion_constant, dynamical_activity, jump_dressed_covariance, me_current, number_variance_exact,
    bulk_number_variance, steady_state_covariance, DriftMatrix, MomentModel, VarianceCurve,
};
pub use propagator::Propagator;

/// `n` log-spaced times from `first` to `last`, preceded by `t = 0`.
pub fn log_times(first: f64, last: f64, n: usize) -> Vec<f64> {
    let (a, b) = (first.ln(), last.ln());
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    std::iter::once(0.0).chain((0..n).map(|i| (a + step * i as f64).exp())).collect()
}
