//! Landauer–Büttiker transport for a chain between two reservoirs.
//!
//! Transmission comes from the resolvent of the effective Hamiltonian. The
//! zero-temperature current and noise are evaluated in closed form by summing
//! residues over the eigenvalues of `h_eff`; [`lb_numeric`] integrates the same
//! quantities numerically for arbitrary chemical potentials and temperature and
//! doubles as an oracle for the residue route.

mod closed_form;
mod error;
mod numeric;
mod residue;
mod transmission;

pub use closed_form::{me_lb_gap_bound, thermal_boxcar_diffusion, wbl_finite_bias};
pub use error::LandauerError;
pub use numeric::{forward_only_noise, lb_numeric, Bias, ForwardNoise, QuadratureOptions};
pub use residue::{current_zero_t, noise_zero_t, transport_zero_t, PoleExpansion, SpectralDecomposition};
pub use transmission::{band_cutoff, transmission, transmission_dense};

/// Average current, diffusion constant and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportSummary {
    pub current: f64,
    pub diffusion: f64,
    pub fano: f64,
}

impl TransportSummary {
    /// Fano factor is `+inf` when the current vanishes.
    pub fn new(current: f64, diffusion: f64) -> Self {
        let fano = if current > 0.0 { diffusion / current } else { f64::INFINITY };
        Self { current, diffusion, fano }
    }
}
