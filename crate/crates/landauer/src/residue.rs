use chain_core::linalg::{tridiagonal_eigenvalues, EigenDecomposition};
use chain_core::{CMat, Complex64, EffectiveHamiltonian};

use crate::numeric::{lb_numeric, Bias, QuadratureOptions};
use crate::{LandauerError, TransportSummary};

const GAP_TOLERANCE: f64 = 1e-9;
const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Modes with `|Im l|` below this fraction of `||h||` are treated as dark.
const DARK_TOLERANCE: f64 = 1e-10;

/// Poles `l` and weights `w_l` of the transmission amplitude, so that
/// `T(E) = |sum_l w_l / (l - E)|^2`.
#[derive(Debug, Clone)]
pub struct PoleExpansion {
    eigenvalues: Vec<Complex64>,
    weights: Vec<Complex64>,
    /// Relative error of each weight implied by eigenvalue round-off,
    /// `eps ||h|| / (distance to the nearest other eigenvalue)`.
    sensitivity: Vec<f64>,
}

impl PoleExpansion {
    /// Eigenvalues from tridiagonal QL; weights from the corner cofactor,
    /// `w_l = sqrt(rate_L rate_R) prod g / prod_{m != l} (l - m)`.
    ///
    /// Close eigenvalues are not rejected up front: a pair of nearly
    /// degenerate modes localized at opposite ends carries exponentially small
    /// weight and is harmless. Instead the residue sums carry an error
    /// estimate and fail with [`LandauerError::Cancellation`] when it is too large.
    pub fn tridiagonal(h: &EffectiveHamiltonian) -> Result<Self, LandauerError> {
        let n = h.dim();
        let matrix_diag: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(h.shifts()[k], h.damping()[k]))
            .collect();
        let eigenvalues = tridiagonal_eigenvalues(&matrix_diag, h.couplings())?;
        if h.couplings().contains(&0.0) {
            return Err(LandauerError::Degenerate { gap: 0.0 });
        }
        let rates = h.rates();
        let log_numerator = 0.5 * (rates.left * rates.right).ln() + h.couplings().iter().map(|g| g.ln()).sum::<f64>();
        let weights = (0..n)
            .map(|l| {
                let log_denominator: Complex64 =
                    (0..n).filter(|&m| m != l).map(|m| (eigenvalues[l] - eigenvalues[m]).ln()).sum();
                (Complex64::new(log_numerator, 0.0) - log_denominator).exp()
            })
            .collect();
        Self::new(eigenvalues, weights, h.scale())
    }

    /// Zeroes the weights of dark modes, whose poles sit on the real axis.
    fn new(eigenvalues: Vec<Complex64>, mut weights: Vec<Complex64>, scale: f64) -> Result<Self, LandauerError> {
        let sensitivity = (0..eigenvalues.len())
            .map(|l| {
                let gap = (0..eigenvalues.len())
                    .filter(|&m| m != l)
                    .map(|m| (eigenvalues[l] - eigenvalues[m]).norm())
                    .fold(f64::INFINITY, f64::min);
                f64::EPSILON * (1.0 + scale / gap)
            })
            .collect();
        let max_weight = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let dark = DARK_TOLERANCE * scale;
        for (l, w) in eigenvalues.iter().zip(weights.iter_mut()) {
            if l.im > -dark {
                if l.im > dark || w.norm() > 1e-6 * max_weight {
                    return Err(LandauerError::NotDissipative(l.to_string()));
                }
                *w = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Self { eigenvalues, weights, sensitivity })
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Indices of modes that carry transmission weight.
    fn bright(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.eigenvalues.len()).filter(|&l| self.weights[l] != Complex64::new(0.0, 0.0))
    }

    /// `G(z) = sum_l w_l / (l - z)` and its derivative.
    fn amplitude(&self, z: Complex64) -> (Complex64, Complex64) {
        self.bright().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(g, dg), l| {
            let r = (self.eigenvalues[l] - z).inv();
            (g + self.weights[l] * r, dg + self.weights[l] * r * r)
        })
    }

    /// Transmission evaluated from the pole expansion.
    pub fn transmission(&self, energy: f64) -> f64 {
        self.amplitude(Complex64::new(energy, 0.0)).0.norm_sqr()
    }

    /// Laurent coefficients of `T` at each upper-half-plane pole `conj(m)`:
    /// the residue `a_-1`, the constant term `a_0`, and the pole's sensitivity.
    fn laurent(&self) -> Vec<(Complex64, Complex64, f64)> {
        self.bright()
            .map(|m| {
                let pole = self.eigenvalues[m].conj();
                let (g, dg) = self.amplitude(pole);
                let w_conj = self.weights[m].conj();
                let rest: Complex64 = self
                    .bright()
                    .filter(|&k| k != m)
                    .map(|k| self.weights[k].conj() / (self.eigenvalues[k].conj() - pole))
                    .sum();
                (-w_conj * g, -w_conj * dg + g * rest, self.sensitivity[m])
            })
            .collect()
    }

    /// `J = (1/2pi) int T dE = i sum_m a_-1(m)`.
    pub fn current(&self) -> Result<f64, LandauerError> {
        let laurent = self.laurent();
        let i = Complex64::new(0.0, 1.0);
        let sum: Complex64 = laurent.iter().map(|(r, _, _)| i * r).sum();
        let magnitude: f64 = laurent.iter().map(|(r, _, _)| r.norm()).sum();
        let error: f64 = laurent.iter().map(|(r, _, s)| 2.0 * r.norm() * s).sum();
        let j = real_part(sum, magnitude)?;
        check_error(j, error)?;
        Ok(j.max(0.0))
    }

    /// `D = (1/2pi) int T(1-T) dE`, with `(1/2pi) int T^2 = 2i sum_m a_-1(m) a_0(m)`.
    pub fn noise(&self) -> Result<f64, LandauerError> {
        let laurent = self.laurent();
        let i = Complex64::new(0.0, 1.0);
        let linear: Complex64 = laurent.iter().map(|(r, _, _)| i * r).sum();
        let quadratic: Complex64 = laurent.iter().map(|(r, c, _)| 2.0 * i * r * c).sum();
        let magnitude: f64 = laurent.iter().map(|(r, c, _)| r.norm() * (1.0 + 2.0 * c.norm())).sum();
        let error: f64 = laurent.iter().map(|(r, c, s)| 4.0 * r.norm() * (1.0 + 2.0 * c.norm()) * s).sum();
        let d = real_part(linear - quadratic, magnitude)?;
        if d < -1e-12 * magnitude {
            return Err(LandauerError::Cancellation(d));
        }
        check_error(d, error)?;
        Ok(d.max(0.0))
    }

    fn summary(&self) -> Result<TransportSummary, LandauerError> {
        Ok(TransportSummary::new(self.current()?, self.noise()?))
    }
}

/// Residue sums are accepted when their estimated round-off error stays
/// below this fraction of the result.
const RESIDUE_ERROR_TOLERANCE: f64 = 1e-8;

fn check_error(value: f64, error: f64) -> Result<(), LandauerError> {
    if error > RESIDUE_ERROR_TOLERANCE * value.abs() && error > 1e-300 {
        return Err(LandauerError::Cancellation(error));
    }
    Ok(())
}

fn check_gap(eigenvalues: &[Complex64], scale: f64) -> Result<(), LandauerError> {
    let mut gap = f64::INFINITY;
    for (i, a) in eigenvalues.iter().enumerate() {
        for b in &eigenvalues[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    if eigenvalues.len() > 1 && gap < GAP_TOLERANCE * scale {
        return Err(LandauerError::Degenerate { gap });
    }
    Ok(())
}

/// Eigen-decomposition of `h_eff` with the pole weights of the transmission.
///
/// With `w_l = sqrt(rate_L rate_R) Q_{1l} (Q^-1)_{lN}` the coefficient tensor
/// is `coeffs[(l, m)] = w_l conj(w_m)`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: CMat,
    pub inverse_vectors: CMat,
    pub coeffs: CMat,
    poles: PoleExpansion,
}

impl SpectralDecomposition {
    pub fn new(h: &EffectiveHamiltonian) -> Result<Self, LandauerError> {
        let matrix = h.matrix();
        let n = h.dim();
        let eig = EigenDecomposition::new(&matrix)?;
        check_gap(&eig.values, matrix.norm())?;
        let rates = h.rates();
        let scale = (rates.left * rates.right).sqrt();
        let weights: Vec<Complex64> =
            (0..n).map(|l| eig.vectors[(0, l)] * eig.inverse[(l, n - 1)] * scale).collect();
        let poles = PoleExpansion::new(eig.values.clone(), weights, h.scale())?;
        let coeffs = CMat::from_fn(n, n, |l, m| poles.weights[l] * poles.weights[m].conj());
        Ok(Self { eigenvalues: eig.values, right_vectors: eig.vectors, inverse_vectors: eig.inverse, coeffs, poles })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn poles(&self) -> &PoleExpansion {
        &self.poles
    }

    /// Transmission evaluated from the pole expansion.
    pub fn transmission(&self, energy: f64) -> f64 {
        self.poles.transmission(energy)
    }
}

fn real_part(z: Complex64, magnitude: f64) -> Result<f64, LandauerError> {
    if z.im.abs() > IMAGINARY_TOLERANCE * magnitude.max(1e-300) && z.im.abs() > 1e-14 {
        return Err(LandauerError::ImaginaryResidue { real: z.re, imag: z.im });
    }
    Ok(z.re)
}

pub fn current_zero_t(dec: &SpectralDecomposition) -> Result<f64, LandauerError> {
    dec.poles.current()
}

pub fn noise_zero_t(dec: &SpectralDecomposition) -> Result<f64, LandauerError> {
    dec.poles.noise()
}

/// Full-bias, zero-temperature transport. Tries residue sums on the
/// tridiagonal pole expansion, then on the dense eigendecomposition, and
/// falls back to adaptive quadrature when both are degenerate or unreliable.
pub fn transport_zero_t(h: &EffectiveHamiltonian) -> Result<TransportSummary, LandauerError> {
    let attempt = PoleExpansion::tridiagonal(h)
        .and_then(|p| p.summary())
        .or_else(|_| SpectralDecomposition::new(h).and_then(|dec| dec.poles.summary()));
    match attempt {
        Ok(summary) => Ok(summary),
        Err(
            LandauerError::Degenerate { .. }
            | LandauerError::Chain(_)
            | LandauerError::NotDissipative(_)
            | LandauerError::ImaginaryResidue { .. }
            | LandauerError::Cancellation(_),
        ) => lb_numeric(h, Bias::full(), QuadratureOptions::default()),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chain_core::ChainSpec;
    use chain_core::linalg::DVec;
    use proptest::prelude::*;

    #[test]
    fn single_site() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![]).unwrap());
        let dec = SpectralDecomposition::new(&h).unwrap();
        assert!((dec.eigenvalues[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((dec.coeffs[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((current_zero_t(&dec).unwrap() - 0.5).abs() < 1e-15);
        assert!((noise_zero_t(&dec).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dimer_reconstructs() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![0.5]).unwrap());
        let dec = SpectralDecomposition::new(&h).unwrap();
        let d = CMat::from_diagonal(&DVec::from_column_slice(&dec.eigenvalues));
        let rec = &dec.right_vectors * d * &dec.inverse_vectors;
        assert!((rec - h.matrix()).norm() < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_falls_back() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![0.0, 0.0]).unwrap());
        assert!(matches!(SpectralDecomposition::new(&h), Err(LandauerError::Degenerate { .. })));
        let summary = transport_zero_t(&h).unwrap();
        assert_eq!(summary.current, 0.0);
    }

    #[test]
    fn dark_modes_are_skipped() {
        // Mirror-symmetric profile with a mode invisible from both ends.
        let half = [0.3821235667494787, 0.2617008979812151, 0.24114722898702778, 0.23592485367098462, 0.26054838998623275, 0.985272490170674];
        let mut g = half.to_vec();
        g.extend([3.3400265741984545; 7]);
        g.extend(half.iter().rev());
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(g).unwrap());
        let exact = lb_numeric(&h, Bias::full(), QuadratureOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_panels: 100_000 }).unwrap();
        let s = transport_zero_t(&h).unwrap();
        assert!((s.current / exact.current - 1.0).abs() < 1e-6, "{s:?} vs {exact:?}");
        assert!((s.diffusion / exact.diffusion - 1.0).abs() < 1e-6, "{s:?} vs {exact:?}");
    }

    #[test]
    fn weak_coupling_starves_current() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::uniform(4, 1e-4).unwrap());
        assert!(transport_zero_t(&h).unwrap().current < 1e-6);
    }

    #[test]
    fn pole_expansion_matches_resolvent() {
        let h = EffectiveHamiltonian::clean(&ChainSpec::new(vec![0.4, 0.7, 0.3, 0.55]).unwrap());
        let dec = SpectralDecomposition::new(&h).unwrap();
        for e in [-2.0, -0.3, 0.0, 0.9, 4.0] {
            let direct = crate::transmission(&h, e).unwrap();
            assert!((dec.transmission(e) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_weights_match_eigenvectors() {
        let spec = ChainSpec::new(vec![0.4, 0.7, 0.3, 0.55, 0.8]).unwrap().with_rates(chain_core::BoundaryRates { left: 0.7, right: 1.3 }).unwrap();
        let h = EffectiveHamiltonian::build(&spec, Some(&[0.1, -0.2, 0.0, 0.3, 0.05, -0.1])).unwrap();
        let fast = PoleExpansion::tridiagonal(&h).unwrap();
        let dense = SpectralDecomposition::new(&h).unwrap();
        for (l, w) in fast.eigenvalues().iter().zip(fast.weights()) {
            let k = (0..dense.dim()).min_by(|&a, &b| (dense.eigenvalues[a] - l).norm().total_cmp(&(dense.eigenvalues[b] - l).norm())).unwrap();
            assert!((dense.eigenvalues[k] - l).norm() < 1e-12);
            assert!((dense.poles().weights()[k] - w).norm() < 1e-10, "{} vs {}", dense.poles().weights()[k], w);
        }
    }

    #[test]
    fn separated_end_modes_stay_on_fast_path() {
        // Overdamped ends bind one mode at each end; their splitting is far
        // below round-off but their weight is negligible.
        let h = EffectiveHamiltonian::clean(&ChainSpec::uniform(60, 0.15).unwrap());
        assert!(matches!(SpectralDecomposition::new(&h), Err(LandauerError::Degenerate { .. })));
        let fast = PoleExpansion::tridiagonal(&h).unwrap().summary().unwrap();
        let tight = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 200_000 };
        let exact = lb_numeric(&h, Bias::full(), tight).unwrap();
        assert!((fast.current / exact.current - 1.0).abs() < 1e-10);
        assert!((fast.diffusion / exact.diffusion - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exceptional_point_is_refused() {
        let rates = chain_core::BoundaryRates { left: 0.2, right: 1.8 };
        let spec = ChainSpec::new(vec![0.4 + 1e-13]).unwrap().with_rates(rates).unwrap();
        let h = EffectiveHamiltonian::clean(&spec);
        let fast = PoleExpansion::tridiagonal(&h).and_then(|p| p.summary());
        assert!(matches!(fast, Err(LandauerError::Cancellation(_))), "{fast:?}");
        let s = transport_zero_t(&h).unwrap();
        let exact = lb_numeric(&h, Bias::full(), QuadratureOptions::default()).unwrap();
        assert!((s.current - exact.current).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn tridiagonal_route_matches_quadrature(gs in proptest::collection::vec(0.1f64..1.2, 0..30),
                                                rate in 0.3f64..2.0) {
            let spec = ChainSpec::new(gs).unwrap().with_rate(rate).unwrap();
            let h = EffectiveHamiltonian::clean(&spec);
            let Ok(poles) = PoleExpansion::tridiagonal(&h) else { return Ok(()) };
            let tight = QuadratureOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 200_000 };
            let exact = lb_numeric(&h, Bias::full(), tight).unwrap();
            let s = poles.summary().unwrap();
            prop_assert!((s.current - exact.current).abs() < 1e-6 * exact.current, "J {} vs {}", s.current, exact.current);
            prop_assert!((s.diffusion - exact.diffusion).abs() < 1e-6 * exact.diffusion, "D {} vs {}", s.diffusion, exact.diffusion);
        }

        #[test]
        fn residues_match_quadrature(gs in proptest::collection::vec(0.1f64..1.2, 0..14),
                                     rate in 0.3f64..2.0) {
            let spec = ChainSpec::new(gs).unwrap().with_rate(rate).unwrap();
            let h = EffectiveHamiltonian::clean(&spec);
            let Ok(dec) = SpectralDecomposition::new(&h) else { return Ok(()) };
            let exact = lb_numeric(&h, Bias::full(), QuadratureOptions::default()).unwrap();
            let j = current_zero_t(&dec).unwrap();
            let d = noise_zero_t(&dec).unwrap();
            prop_assert!((j - exact.current).abs() < 1e-6 * exact.current, "J {j} vs {}", exact.current);
            prop_assert!((d - exact.diffusion).abs() < 1e-6 * exact.diffusion, "D {d} vs {}", exact.diffusion);
        }
    }
}
