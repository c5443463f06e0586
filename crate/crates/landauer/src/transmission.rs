use chain_core::{CMat, Complex64, EffectiveHamiltonian};

use crate::LandauerError;

const ABOVE_ONE_TOLERANCE: f64 = 1e-9;

/// Transmission probability `rate_L rate_R |[(h_eff - E)^-1]_{1N}|^2`.
///
/// The corner element of the resolvent of a tridiagonal matrix is the product
/// of the couplings over the determinant, so a single pass of pivots suffices.
pub fn transmission(h: &EffectiveHamiltonian, energy: f64) -> Result<f64, LandauerError> {
    let raw = raw_transmission(h, energy)?;
    clamp(raw, energy)
}

pub(crate) fn raw_transmission(h: &EffectiveHamiltonian, energy: f64) -> Result<f64, LandauerError> {
    let rates = h.rates();
    let g = h.couplings();
    if g.iter().any(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let damping = h.damping();
    let mut log_t = (rates.left * rates.right).ln();
    let mut prev = Complex64::new(0.0, 0.0);
    for (k, (&w, &d)) in h.shifts().iter().zip(&damping).enumerate() {
        let diag = Complex64::new(w - energy, d);
        let pivot = if k == 0 { diag } else { diag - g[k - 1] * g[k - 1] / prev };
        if pivot.norm() == 0.0 || !pivot.is_finite() {
            return Err(LandauerError::SingularResolvent(energy));
        }
        log_t -= 2.0 * pivot.norm().ln();
        prev = pivot;
    }
    log_t += 2.0 * g.iter().map(|x| x.ln()).sum::<f64>();
    Ok(log_t.exp())
}

fn clamp(raw: f64, energy: f64) -> Result<f64, LandauerError> {
    if raw > 1.0 + ABOVE_ONE_TOLERANCE || raw.is_nan() {
        return Err(LandauerError::TransmissionAboveOne { energy, value: raw });
    }
    Ok(raw.min(1.0))
}

/// Same quantity from a dense LU solve of `(h_eff - E) x = e_N`.
pub fn transmission_dense(h: &EffectiveHamiltonian, energy: f64) -> Result<f64, LandauerError> {
    let n = h.dim();
    let shifted = h.matrix() - CMat::identity(n, n) * Complex64::new(energy, 0.0);
    let mut rhs = CMat::zeros(n, 1);
    rhs[(n - 1, 0)] = Complex64::new(1.0, 0.0);
    let x = chain_core::linalg::solve(&shifted, &rhs).map_err(|_| LandauerError::SingularResolvent(energy))?;
    let rates = h.rates();
    clamp(rates.left * rates.right * x[(0, 0)].norm_sqr(), energy)
}

/// Energy beyond which only the Lorentzian tails of `T(E)` remain.
pub fn band_cutoff(h: &EffectiveHamiltonian) -> f64 {
    let g = h.couplings().iter().copied().fold(0.0, f64::max);
    let w = h.shifts().iter().map(|x| x.abs()).fold(0.0, f64::max);
    let rate = h.rates().left.max(h.rates().right);
    2.0 * g + 10.0 * rate + w
}
