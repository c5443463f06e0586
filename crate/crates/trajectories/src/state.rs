use chain_core::linalg::{hermitian_eigen, hermitize};
use chain_core::{CMat, Complex64, EffectiveHamiltonian, Occupations};
use serde::{Deserialize, Serialize};

use crate::TrajectoryError;

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;
pub const PURITY_TOLERANCE: f64 = 1e-6;
/// Smallest jump weight (`1 - C_kk` or `C_kk`) for which a jump is applied.
pub const JUMP_TOLERANCE: f64 = 1e-12;
/// Re-projection warns when an eigenvalue lies closer than this to 1/2.
pub const REPROJECTION_GAP: f64 = 1e-3;

/// The four boundary jump channels; `RightOut` is a tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JumpKind {
    LeftIn,
    LeftOut,
    RightIn,
    RightOut,
}

impl JumpKind {
    pub const ALL: [JumpKind; 4] = [JumpKind::LeftIn, JumpKind::LeftOut, JumpKind::RightIn, JumpKind::RightOut];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Change in particle number caused by the jump.
    pub fn charge(self) -> i64 {
        match self {
            JumpKind::LeftIn | JumpKind::RightIn => 1,
            JumpKind::LeftOut | JumpKind::RightOut => -1,
        }
    }
}

/// One-body covariance `C_ij = <c_i^dagger c_j>` of a Gaussian state; for a
/// pure (Slater) state also its particle number.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub matrix: CMat,
    pub n_excitations: Option<usize>,
}

impl CovarianceState {
    pub fn vacuum(n_sites: usize) -> Self {
        Self { matrix: CMat::zeros(n_sites, n_sites), n_excitations: Some(0) }
    }

    pub fn new(matrix: CMat, n_excitations: Option<usize>) -> Result<Self, TrajectoryError> {
        let state = Self { matrix, n_excitations };
        state.validate()?;
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn occupation(&self, site: usize) -> f64 {
        self.matrix[(site, site)].re
    }

    /// `max |C^2 - C|`.
    pub fn purity_defect(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).camax()
    }

    pub fn validate(&self) -> Result<(), TrajectoryError> {
        let m = &self.matrix;
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(TrajectoryError::Invariant("covariance must be a non-empty square matrix".into()));
        }
        let skew = (m - m.adjoint()).camax();
        if skew > HERMITIAN_TOLERANCE {
            return Err(TrajectoryError::Invariant(format!("Hermiticity defect {skew:e}")));
        }
        let (values, _) = hermitian_eigen(m);
        let (lo, hi) = (values[0], values[values.len() - 1]);
        if lo < -SPECTRUM_TOLERANCE || hi > 1.0 + SPECTRUM_TOLERANCE {
            return Err(TrajectoryError::Invariant(format!("spectrum [{lo}, {hi}] leaves [0, 1]")));
        }
        if let Some(count) = self.n_excitations {
            let defect = self.purity_defect();
            let trace = m.trace().re;
            if defect > PURITY_TOLERANCE || (trace - count as f64).abs() > PURITY_TOLERANCE {
                return Err(TrajectoryError::Invariant(format!(
                    "pure state with {count} particles has |C^2 - C| = {defect:e}, trace {trace}"
                )));
            }
        }
        Ok(())
    }
}

/// Jump rates `(LeftIn, LeftOut, RightIn, RightOut)`.
pub fn jump_rates(state: &CovarianceState, hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> Result<[f64; 4], TrajectoryError> {
    let rates = hamiltonian.rates();
    let first = state.occupation(0);
    let last = state.occupation(state.dim() - 1);
    let values = [
        rates.left * occupations.left * (1.0 - first),
        rates.left * (1.0 - occupations.left) * first,
        rates.right * occupations.right * (1.0 - last),
        rates.right * (1.0 - occupations.right) * last,
    ];
    let mut clamped = [0.0; 4];
    for ((out, rate), kind) in clamped.iter_mut().zip(values).zip(JumpKind::ALL) {
        if rate < -SPECTRUM_TOLERANCE * (rates.left + rates.right) {
            return Err(TrajectoryError::NegativeRate { kind, rate });
        }
        *out = rate.max(0.0);
    }
    Ok(clamped)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Conditional covariance after a jump of the given kind.
pub fn apply_jump(state: &CovarianceState, kind: JumpKind) -> Result<CovarianceState, TrajectoryError> {
    let n = state.dim();
    let site = match kind {
        JumpKind::LeftIn | JumpKind::LeftOut => 0,
        JumpKind::RightIn | JumpKind::RightOut => n - 1,
    };
    let c = &state.matrix;
    let occupied = state.occupation(site);
    let mut matrix = match kind {
        JumpKind::LeftOut | JumpKind::RightOut => {
            if occupied < JUMP_TOLERANCE {
                return Err(TrajectoryError::ImpossibleJump { kind, weight: occupied });
            }
            c - c.column(site) * c.row(site) / real(occupied)
        }
        JumpKind::LeftIn | JumpKind::RightIn => {
            let empty = 1.0 - occupied;
            if empty < JUMP_TOLERANCE {
                return Err(TrajectoryError::ImpossibleJump { kind, weight: empty });
            }
            let hole = CMat::identity(n, n) - c;
            c + hole.column(site) * hole.row(site) / real(empty)
        }
    };
    if site == n - 1 {
        // Jordan–Wigner string of the last-site spin operator.
        for k in 0..n - 1 {
            matrix[(k, n - 1)] = -matrix[(k, n - 1)];
            matrix[(n - 1, k)] = -matrix[(n - 1, k)];
        }
    }
    hermitize(&mut matrix);
    let n_excitations = state.n_excitations.map(|m| (m as i64 + kind.charge()).max(0) as usize);
    Ok(CovarianceState { matrix, n_excitations })
}

/// Normalized no-jump flow
/// `dC/dt = i(hC - Ch) - sum_ends kappa/2 (Pi C + C Pi - 2 C Pi C)`
/// with `kappa = rate (1 - 2 f)` at each end.
#[derive(Debug, Clone)]
pub struct RiccatiFlow {
    hopping: CMat,
    left: f64,
    right: f64,
}

impl RiccatiFlow {
    pub fn new(hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> Self {
        let rates = hamiltonian.rates();
        Self {
            hopping: hamiltonian.hermitian_part(),
            left: rates.left * (1.0 - 2.0 * occupations.left),
            right: rates.right * (1.0 - 2.0 * occupations.right),
        }
    }

    pub fn derivative(&self, c: &CMat) -> CMat {
        let n = c.nrows();
        let hc = &self.hopping * c;
        let mut d = (&hc - hc.adjoint()) * Complex64::i();
        for (site, kappa) in [(0, self.left), (n - 1, self.right)] {
            if kappa == 0.0 {
                continue;
            }
            let outer = c.column(site) * c.row(site);
            let mut term = outer * real(-2.0);
            for k in 0..n {
                term[(site, k)] += c[(site, k)];
                term[(k, site)] += c[(k, site)];
            }
            d -= term * real(kappa / 2.0);
        }
        d
    }

    /// One classical fourth-order Runge–Kutta step, re-symmetrized.
    pub fn step(&self, c: &CMat, dt: f64) -> CMat {
        let h = real(dt);
        let half = real(dt / 2.0);
        let k1 = self.derivative(c);
        let k2 = self.derivative(&(c + &k1 * half));
        let k3 = self.derivative(&(c + &k2 * half));
        let k4 = self.derivative(&(c + &k3 * h));
        let mut next = c + (k1 + (k2 + k3) * real(2.0) + k4) * real(dt / 6.0);
        hermitize(&mut next);
        next
    }
}

/// One no-jump step of length `dt`.
pub fn no_jump_step(
    state: &CovarianceState,
    hamiltonian: &EffectiveHamiltonian,
    occupations: Occupations,
    dt: f64,
) -> Result<CovarianceState, TrajectoryError> {
    let matrix = RiccatiFlow::new(hamiltonian, occupations).step(&state.matrix, dt);
    let next = CovarianceState { matrix, n_excitations: state.n_excitations };
    check_cheap(&next)?;
    Ok(next)
}

/// Hermiticity and diagonal-range check without an eigendecomposition.
pub(crate) fn check_cheap(state: &CovarianceState) -> Result<(), TrajectoryError> {
    let diag_ok = state
        .matrix
        .diagonal()
        .iter()
        .all(|z| z.re > -SPECTRUM_TOLERANCE && z.re < 1.0 + SPECTRUM_TOLERANCE && z.re.is_finite());
    if !diag_ok {
        return Err(TrajectoryError::Invariant("occupation left [0, 1] during integration".into()));
    }
    Ok(())
}

/// Rounds a nearly pure covariance back onto a projector of rank `n_excitations`.
pub fn reproject(state: &CovarianceState) -> Result<CovarianceState, TrajectoryError> {
    let count = state
        .n_excitations
        .ok_or_else(|| TrajectoryError::Domain("re-projection needs a pure state".into()))?;
    let n = state.dim();
    let (values, vectors) = hermitian_eigen(&state.matrix);
    let closest = values.iter().map(|v| (v - 0.5).abs()).fold(f64::INFINITY, f64::min);
    if closest < REPROJECTION_GAP {
        log::warn!("eigenvalue within {closest:e} of 1/2 at re-projection; integration step too coarse");
    }
    let kept = vectors.columns(n - count, count);
    let matrix = kept * kept.adjoint();
    Ok(CovarianceState { matrix, n_excitations: Some(count) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chain_core::{linalg::site_projector, ChainSpec};

    fn full_bias(n: usize) -> EffectiveHamiltonian {
        EffectiveHamiltonian::clean(&ChainSpec::uniform(n, 0.5).unwrap())
    }

    #[test]
    fn vacuum_and_filled_chain_are_no_jump_stationary() {
        let flow = RiccatiFlow::new(&full_bias(4), Occupations::FULL_BIAS);
        assert_eq!(flow.derivative(&CMat::zeros(4, 4)).camax(), 0.0);
        assert!(flow.derivative(&CMat::identity(4, 4)).camax() < 1e-15);
    }

    #[test]
    fn rates_at_full_bias() {
        let h = full_bias(3);
        let vacuum = CovarianceState::vacuum(3);
        assert_eq!(jump_rates(&vacuum, &h, Occupations::FULL_BIAS).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let last = CovarianceState::new(site_projector(3, 2), Some(1)).unwrap();
        assert_eq!(jump_rates(&last, &h, Occupations::FULL_BIAS).unwrap()[3], 1.0);
    }

    #[test]
    fn jump_updates() {
        let vacuum = CovarianceState::vacuum(3);
        let filled = apply_jump(&vacuum, JumpKind::LeftIn).unwrap();
        assert_eq!(filled.matrix, site_projector(3, 0));
        assert_eq!(filled.n_excitations, Some(1));
        let last = CovarianceState::new(site_projector(3, 2), Some(1)).unwrap();
        let emptied = apply_jump(&last, JumpKind::RightOut).unwrap();
        assert!(emptied.matrix.camax() < 1e-15);
        let full = CovarianceState::new(CMat::identity(3, 3), Some(3)).unwrap();
        assert!(matches!(apply_jump(&full, JumpKind::LeftIn), Err(TrajectoryError::ImpossibleJump { .. })));
        assert!(matches!(apply_jump(&vacuum, JumpKind::RightOut), Err(TrajectoryError::ImpossibleJump { .. })));
    }

    #[test]
    fn jumps_move_the_trace_by_one() {
        let v = nalgebra::DVector::from_vec(vec![real(0.6), Complex64::new(0.0, 0.48), real(0.64)]);
        let c = &v * v.adjoint();
        let state = CovarianceState::new(c, Some(1)).unwrap();
        for kind in JumpKind::ALL {
            if let Ok(next) = apply_jump(&state, kind) {
                assert!((next.matrix.trace().re - 1.0 - kind.charge() as f64).abs() < 1e-14);
                next.validate().unwrap();
            }
        }
    }

    #[test]
    fn reprojection_cleans_noise() {
        let v = nalgebra::DVector::from_vec(vec![real(0.6), Complex64::new(0.0, 0.8), real(0.0)]);
        let projector = &v * v.adjoint();
        let state = CovarianceState::new(projector.clone(), Some(1)).unwrap();
        assert!((reproject(&state).unwrap().matrix - &projector).camax() < 1e-12);
        let mut noise = CMat::from_fn(3, 3, |i, j| Complex64::new(1e-7 * (i + 2 * j) as f64, 1e-7 * (i as f64 - j as f64)));
        hermitize(&mut noise);
        let noisy = CovarianceState { matrix: projector + noise, n_excitations: Some(1) };
        assert!(reproject(&noisy).unwrap().purity_defect() < 1e-12);
    }

    #[test]
    fn validation_catches_bad_states() {
        assert!(CovarianceState::new(CMat::identity(2, 2) * real(1.5), None).is_err());
        assert!(CovarianceState::new(CMat::identity(2, 2) * real(0.5), Some(1)).is_err());
        assert!(CovarianceState::new(CMat::identity(2, 2) * real(0.5), None).is_ok());
    }
}
