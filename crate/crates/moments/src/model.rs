use chain_core::{ChainSpec, CMat, Complex64, EffectiveHamiltonian, Occupations};

use crate::{Lyapunov, MomentsError, Propagator};

/// Currents below this multiple of the right rate count as zero.
const ZERO_CURRENT: f64 = 1e-13;
/// Largest `|Im|/|Re|` accepted for traces that are real in exact arithmetic.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Generator of the covariance dynamics, `dC/dt = K C + C K^dagger + P`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    /// `K = i h - (rate_L Pi_1 + rate_R Pi_N)/2`.
    pub drift: CMat,
    /// `P = rate_L f_L Pi_1 + rate_R f_R Pi_N`.
    pub pump: CMat,
}

impl DriftMatrix {
    pub fn new(hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> Self {
        let n = hamiltonian.dim();
        let rates = hamiltonian.rates();
        let mut drift = hamiltonian.hermitian_part() * Complex64::i();
        let mut pump = CMat::zeros(n, n);
        drift[(0, 0)] -= real(rates.left / 2.0);
        drift[(n - 1, n - 1)] -= real(rates.right / 2.0);
        pump[(0, 0)] += real(rates.left * occupations.left);
        pump[(n - 1, n - 1)] += real(rates.right * occupations.right);
        Self { drift, pump }
    }

    pub fn from_spec(spec: &ChainSpec) -> Self {
        Self::new(&EffectiveHamiltonian::clean(spec), spec.occupations())
    }
}

/// Counting-variance curve on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCurve {
    pub times: Vec<f64>,
    pub variance: Vec<f64>,
    /// Long-time slope of the variance.
    pub diffusion: f64,
    /// Short-time slope: the dynamical activity at the right lead, zero for a bond current.
    pub activity: f64,
}

/// Steady state of one chain together with the cached Schur form of its drift.
#[derive(Debug, Clone)]
pub struct MomentModel {
    drift: DriftMatrix,
    lyapunov: Lyapunov,
    covariance: CMat,
    rate_right: f64,
    occupation_right: f64,
}

impl MomentModel {
    pub fn new(hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> Result<Self, MomentsError> {
        let drift = DriftMatrix::new(hamiltonian, occupations);
        let lyapunov = Lyapunov::new(&drift.drift)?;
        let mut covariance = lyapunov.solve(&(-&drift.pump));
        chain_core::linalg::hermitize(&mut covariance);
        Ok(Self {
            drift,
            lyapunov,
            covariance,
            rate_right: hamiltonian.rates().right,
            occupation_right: occupations.right,
        })
    }

    pub fn from_spec(spec: &ChainSpec) -> Result<Self, MomentsError> {
        Self::new(&EffectiveHamiltonian::clean(spec), spec.occupations())
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn drift(&self) -> &DriftMatrix {
        &self.drift
    }

    pub fn covariance(&self) -> &CMat {
        &self.covariance
    }

    fn last_occupation(&self) -> f64 {
        let n = self.dim();
        self.covariance[(n - 1, n - 1)].re
    }

    /// Mean particle current into the right reservoir.
    pub fn current(&self) -> f64 {
        self.rate_right * (self.last_occupation() - self.occupation_right)
    }

    /// Total jump rate at the right lead.
    pub fn activity(&self) -> f64 {
        self.rate_right * ((1.0 - 2.0 * self.occupation_right) * self.last_occupation() + self.occupation_right)
    }

    fn nonzero_current(&self) -> Result<f64, MomentsError> {
        let current = self.current();
        if current.abs() <= ZERO_CURRENT * self.rate_right.max(f64::MIN_POSITIVE) {
            return Err(MomentsError::ZeroCurrent(current));
        }
        Ok(current)
    }

    /// Covariance dressed by one counted jump at the right lead: emissions
    /// weighted `+1`, absorptions `-1`, normalized by the mean current.
    pub fn jump_dressed(&self) -> Result<CMat, MomentsError> {
        let current = self.nonzero_current()?;
        let n = self.dim();
        let c = &self.covariance;
        let hole = CMat::identity(n, n) - c;
        let emitted = c.column(n - 1) * c.row(n - 1);
        let absorbed = hole.column(n - 1) * hole.row(n - 1);
        let (gamma, f) = (self.rate_right, self.occupation_right);
        let dressing = emitted * real(-gamma * (1.0 - f)) - absorbed * real(gamma * f);
        Ok(c + dressing / real(current))
    }

    /// One-body matrix `J_k` of the particle current across bond `k` (counted
    /// from the right, left to right positive), with `<I_k> = tr[J_k C]`.
    pub fn bond_current_matrix(&self, bond: usize) -> Result<CMat, MomentsError> {
        let n = self.dim();
        if bond == 0 || bond >= n {
            return Err(MomentsError::BadBond { bond, max: n.saturating_sub(1) });
        }
        let (left, right) = (n - 1 - bond, n - bond);
        let coupling = self.drift.drift[(left, right)].im;
        let mut m = CMat::zeros(n, n);
        m[(left, right)] = Complex64::new(0.0, -coupling);
        m[(right, left)] = Complex64::new(0.0, coupling);
        Ok(m)
    }

    /// Covariance dressed by the bond-current operator, `C + (C J_k - C J_k C)/J`.
    pub fn bond_dressed(&self, bond: usize) -> Result<CMat, MomentsError> {
        let current = self.nonzero_current()?;
        let c = &self.covariance;
        let cj = c * self.bond_current_matrix(bond)?;
        Ok(c + (&cj - &cj * c) / real(current))
    }

    /// Long-time slope of the right-lead counting variance.
    pub fn diffusion(&self) -> Result<f64, MomentsError> {
        let current = self.current();
        let once = self.lyapunov.solve(&(self.jump_dressed()? - &self.covariance));
        let n = self.dim();
        Ok(self.activity() - 2.0 * self.rate_right * current * once[(n - 1, n - 1)].re)
    }

    /// Long-time slope of the counting variance across bond `k`.
    pub fn bond_diffusion(&self, bond: usize) -> Result<f64, MomentsError> {
        let current = self.current();
        let once = self.lyapunov.solve(&(self.bond_dressed(bond)? - &self.covariance));
        Ok(-2.0 * current * (self.bond_current_matrix(bond)? * once).trace().re)
    }

    /// `C(t)` from `C(0) = initial`.
    pub fn propagate(&self, initial: &CMat, t: f64) -> CMat {
        let e = Propagator::new(&self.drift.drift).at(t);
        &self.covariance + &e * (initial - &self.covariance) * e.adjoint()
    }

    /// Variance of the net number of particles emitted into the right
    /// reservoir during `[0, t]`, starting from the steady state.
    pub fn number_variance(&self, times: &[f64]) -> Result<VarianceCurve, MomentsError> {
        check_times(times)?;
        let n = self.dim();
        let current = self.current();
        let diffusion = self.diffusion()?;
        let twice = self.twice_inverted(&self.jump_dressed()?);
        let weight = 2.0 * self.rate_right * current;
        let corner = |m: &CMat| m[(n - 1, n - 1)];
        let offset = checked_real(corner(&twice))?;
        let variance = self
            .propagated(&twice, times, corner)
            .into_iter()
            .zip(times)
            .map(|(trace, &t)| Ok(diffusion * t + weight * (checked_real(trace)? - offset)))
            .collect::<Result<_, MomentsError>>()?;
        Ok(VarianceCurve { times: times.to_vec(), variance, diffusion, activity: self.activity() })
    }

    /// Variance of the integrated particle current across bond `k` (counted from the right).
    pub fn bond_number_variance(&self, bond: usize, times: &[f64]) -> Result<VarianceCurve, MomentsError> {
        check_times(times)?;
        let current = self.current();
        let diffusion = self.bond_diffusion(bond)?;
        let bond_matrix = self.bond_current_matrix(bond)?;
        let twice = self.twice_inverted(&self.bond_dressed(bond)?);
        let weight = 2.0 * current;
        let projected = |m: &CMat| (&bond_matrix * m).trace();
        let offset = projected(&twice).re;
        let variance = self
            .propagated(&twice, times, projected)
            .into_iter()
            .zip(times)
            .map(|(trace, &t)| diffusion * t + weight * (trace.re - offset))
            .collect();
        Ok(VarianceCurve { times: times.to_vec(), variance, diffusion, activity: 0.0 })
    }

    fn twice_inverted(&self, dressed: &CMat) -> CMat {
        self.lyapunov.solve(&self.lyapunov.solve(&(dressed - &self.covariance)))
    }

    /// `project(e^{Kt} m e^{K^dagger t})` on each time.
    fn propagated(&self, m: &CMat, times: &[f64], project: impl Fn(&CMat) -> Complex64) -> Vec<Complex64> {
        let propagator = Propagator::new(&self.drift.drift);
        times
            .iter()
            .map(|&t| {
                let e = propagator.at(t);
                project(&(&e * m * e.adjoint()))
            })
            .collect()
    }
}

fn checked_real(z: Complex64) -> Result<f64, MomentsError> {
    if z.im.abs() > IMAGINARY_TOLERANCE * z.re.abs().max(f64::MIN_POSITIVE) && z.im.abs() > 1e-300 {
        return Err(MomentsError::ImaginaryTrace { real: z.re, imag: z.im });
    }
    Ok(z.re)
}

fn check_times(times: &[f64]) -> Result<(), MomentsError> {
    let ordered = times.windows(2).all(|w| w[1] > w[0]);
    if times.is_empty() || !ordered || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(MomentsError::BadTimes);
    }
    Ok(())
}

pub fn steady_state_covariance(spec: &ChainSpec) -> Result<CMat, MomentsError> {
    Ok(MomentModel::from_spec(spec)?.covariance)
}

pub fn me_current(spec: &ChainSpec) -> Result<f64, MomentsError> {
    Ok(MomentModel::from_spec(spec)?.current())
}

pub fn dynamical_activity(spec: &ChainSpec) -> Result<f64, MomentsError> {
    Ok(MomentModel::from_spec(spec)?.activity())
}

pub fn jump_dressed_covariance(spec: &ChainSpec) -> Result<CMat, MomentsError> {
    MomentModel::from_spec(spec)?.jump_dressed()
}

pub fn diffusion_constant(spec: &ChainSpec) -> Result<f64, MomentsError> {
    MomentModel::from_spec(spec)?.diffusion()
}

pub fn number_variance_exact(spec: &ChainSpec, times: &[f64]) -> Result<VarianceCurve, MomentsError> {
    MomentModel::from_spec(spec)?.number_variance(times)
}

pub fn bulk_number_variance(spec: &ChainSpec, bond: usize, times: &[f64]) -> Result<VarianceCurve, MomentsError> {
    MomentModel::from_spec(spec)?.bond_number_variance(bond, times)
}
