use std::cell::RefCell;
use std::f64::consts::PI;

use chain_core::quad::{self, Tolerance};
use chain_core::EffectiveHamiltonian;

use crate::transmission::{band_cutoff, raw_transmission};
use crate::{LandauerError, TransportSummary};

/// Chemical potentials and inverse temperature of the two reservoirs.
/// Infinite `beta` means step occupations; infinite potentials mean a
/// completely full or empty reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bias {
    pub mu_left: f64,
    pub mu_right: f64,
    pub beta: f64,
}

impl Bias {
    /// Left reservoir full and right reservoir empty at every energy.
    pub fn full() -> Self {
        Self { mu_left: f64::INFINITY, mu_right: f64::NEG_INFINITY, beta: f64::INFINITY }
    }

    pub fn new(mu_left: f64, mu_right: f64, beta: f64) -> Result<Self, LandauerError> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(LandauerError::Domain(format!("inverse temperature must be positive, got {beta}")));
        }
        if mu_left.is_nan() || mu_right.is_nan() || mu_left < mu_right {
            return Err(LandauerError::Domain(format!("need mu_left >= mu_right, got {mu_left} < {mu_right}")));
        }
        Ok(Self { mu_left, mu_right, beta })
    }

    fn fermi(mu: f64, beta: f64, energy: f64) -> f64 {
        if mu == f64::INFINITY {
            return 1.0;
        }
        if mu == f64::NEG_INFINITY {
            return 0.0;
        }
        let x = energy - mu;
        if beta.is_infinite() {
            return if x < 0.0 {
                1.0
            } else if x > 0.0 {
                0.0
            } else {
                0.5
            };
        }
        let y = beta * x;
        if y > 0.0 {
            let e = (-y).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + y.exp())
        }
    }

    pub fn left(&self, energy: f64) -> f64 {
        Self::fermi(self.mu_left, self.beta, energy)
    }

    pub fn right(&self, energy: f64) -> f64 {
        Self::fermi(self.mu_right, self.beta, energy)
    }

    fn breakpoints(&self) -> Vec<f64> {
        [self.mu_left, self.mu_right].into_iter().filter(|m| m.is_finite()).collect()
    }
}

/// Quadrature tolerances for the numeric transport integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-10, max_panels: 50_000 }
    }
}

/// Integrates `weight(T, E)` over the real line with breaks at finite
/// chemical potentials and an exact map of the Lorentzian tails.
fn integrate<F>(h: &EffectiveHamiltonian, bias: &Bias, opts: QuadratureOptions, weight: F) -> Result<f64, LandauerError>
where
    F: Fn(f64, f64) -> f64,
{
    let failure: RefCell<Option<LandauerError>> = RefCell::new(None);
    let integrand = |e: f64| match raw_transmission(h, e) {
        Ok(t) if t <= 1.0 + 1e-9 => weight(t.min(1.0), e),
        Ok(t) => {
            failure.borrow_mut().get_or_insert(LandauerError::TransmissionAboveOne { energy: e, value: t });
            0.0
        }
        Err(err) => {
            failure.borrow_mut().get_or_insert(err);
            0.0
        }
    };
    let breaks = bias.breakpoints();
    let cut = breaks.iter().fold(band_cutoff(h), |c, m| c.max(m.abs() + 1.0));
    let mut points = vec![-cut];
    let mut inner: Vec<f64> = breaks.into_iter().filter(|m| m.abs() < cut).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(cut);

    let tol = Tolerance { abs: opts.abs_tol * 0.1, rel: opts.rel_tol, max_panels: opts.max_panels };
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let panels = (((w[1] - w[0]) / 0.25).ceil() as usize).clamp(1, 400);
        let est = quad::adaptive(&integrand, w[0], w[1], panels, tol);
        value += est.value;
        error += est.error;
    }
    for sign in [-1.0, 1.0] {
        let est = quad::adaptive(
            |u: f64| if u <= 0.0 { 0.0 } else { integrand(sign * cut / u) * cut / (u * u) },
            0.0,
            1.0,
            4,
            tol,
        );
        value += est.value;
        error += est.error;
    }
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let requested = opts.abs_tol.max(opts.rel_tol * value.abs());
    if error > requested {
        return Err(LandauerError::Quadrature { achieved: error, requested });
    }
    Ok(value / (2.0 * PI))
}

/// Current and zero-frequency noise from direct quadrature of the
/// Landauer–Büttiker integrals.
pub fn lb_numeric(h: &EffectiveHamiltonian, bias: Bias, opts: QuadratureOptions) -> Result<TransportSummary, LandauerError> {
    let current = integrate(h, &bias, opts, |t, e| t * (bias.left(e) - bias.right(e)))?;
    let diffusion = integrate(h, &bias, opts, |t, e| {
        let (fl, fr) = (bias.left(e), bias.right(e));
        t * (1.0 - t) * (fl - fr).powi(2) + t * (fl * (1.0 - fl) + fr * (1.0 - fr))
    })?;
    Ok(TransportSummary::new(current.max(0.0), diffusion.max(0.0)))
}

/// Forward and backward counting statistics. `cross` is the covariance of
/// forward and backward counts per unit time, so that
/// `D = d_plus + d_minus - 2 cross`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardNoise {
    pub j_plus: f64,
    pub d_plus: f64,
    pub j_minus: f64,
    pub d_minus: f64,
    pub cross: f64,
}

pub fn forward_only_noise(h: &EffectiveHamiltonian, bias: Bias, opts: QuadratureOptions) -> Result<ForwardNoise, LandauerError> {
    let forward = |e: f64| bias.left(e) * (1.0 - bias.right(e));
    let backward = |e: f64| bias.right(e) * (1.0 - bias.left(e));
    let j_plus = integrate(h, &bias, opts, |t, e| t * forward(e))?;
    let d_plus = integrate(h, &bias, opts, |t, e| t * forward(e) - (t * forward(e)).powi(2))?;
    let j_minus = integrate(h, &bias, opts, |t, e| t * backward(e))?;
    let d_minus = integrate(h, &bias, opts, |t, e| t * backward(e) - (t * backward(e)).powi(2))?;
    let cross = -integrate(h, &bias, opts, |t, e| t * t * forward(e) * backward(e))?;
    Ok(ForwardNoise { j_plus, d_plus, j_minus, d_minus, cross })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chain_core::ChainSpec;

    fn tight() -> QuadratureOptions {
        QuadratureOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 50_000 }
    }

    #[test]
    fn single_site_full_bias() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![]).unwrap());
        let s = lb_numeric(&h, Bias::full(), tight()).unwrap();
        assert!((s.current - 0.5).abs() < 1e-11);
        assert!((s.diffusion - 0.25).abs() < 1e-11);
        assert!((s.fano - 0.5).abs() < 1e-10);
    }

    #[test]
    fn closed_window_carries_nothing() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::uniform(4, 0.5).unwrap());
        let s = lb_numeric(&h, Bias::new(0.3, 0.3, f64::INFINITY).unwrap(), tight()).unwrap();
        assert_eq!(s.current, 0.0);
        assert_eq!(s.diffusion, 0.0);
        let f = forward_only_noise(&h, Bias::new(0.3, 0.3, f64::INFINITY).unwrap(), tight()).unwrap();
        assert_eq!((f.j_plus, f.d_plus, f.j_minus, f.cross), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn bias_is_validated() {
        assert!(Bias::new(0.0, 1.0, 1.0).is_err());
        assert!(Bias::new(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn step_window_matches_lorentzian_integral() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![]).unwrap());
        let s = lb_numeric(&h, Bias::new(1.0, -0.5, f64::INFINITY).unwrap(), tight()).unwrap();
        let expected = (1f64.atan() - (-0.5f64).atan()) / (2.0 * PI);
        assert!((s.current - expected).abs() < 1e-11);
    }

    #[test]
    fn forward_backward_decomposition() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![0.4, 0.6, 0.4]).unwrap());
        let full = forward_only_noise(&h, Bias::full(), tight()).unwrap();
        let lb = lb_numeric(&h, Bias::full(), tight()).unwrap();
        assert_eq!(full.j_minus, 0.0);
        assert_eq!(full.cross, 0.0);
        assert!((full.d_plus - lb.diffusion).abs() < 1e-10);

        for (mu_l, mu_r, beta) in [(0.5, -0.5, 2.0), (0.2, 0.1, 10.0), (1.5, -0.3, 0.7)] {
            let bias = Bias::new(mu_l, mu_r, beta).unwrap();
            let f = forward_only_noise(&h, bias, tight()).unwrap();
            let lb = lb_numeric(&h, bias, tight()).unwrap();
            assert!((f.d_plus + f.d_minus - 2.0 * f.cross - lb.diffusion).abs() < 1e-8);
            assert!((f.j_plus - f.j_minus - lb.current).abs() < 1e-9);
            assert!(f.cross <= 0.0);
        }
    }
}
