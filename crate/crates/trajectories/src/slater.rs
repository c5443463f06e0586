use chain_core::linalg::{expm, EigenDecomposition};
use chain_core::{CMat, Complex64, EffectiveHamiltonian, Occupations};
use rand::Rng;

use crate::state::JUMP_TOLERANCE;
use crate::{CovarianceState, JumpKind, TrajectoryError};

/// Eigenvector condition number above which propagation uses `expm` directly.
const CONDITION_LIMIT: f64 = 1e6;
/// Relative accuracy of sampled jump times.
const ROOT_TOLERANCE: f64 = 1e-13;

/// Pure Gaussian state as orthonormal orbitals `Phi` (sites x particles),
/// with covariance `C = conj(Phi Phi^dagger)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slater {
    orbitals: CMat,
}

/// Orthonormal basis of the column span and `ln det(A^dagger A)`.
fn orthonormalize(a: CMat) -> (CMat, f64) {
    if a.ncols() == 0 {
        return (a, 0.0);
    }
    let qr = a.qr();
    let log_gram = qr.r().diagonal().iter().map(|r| 2.0 * r.norm().ln()).sum();
    (qr.q(), log_gram)
}

impl Slater {
    pub fn vacuum(n_sites: usize) -> Self {
        Self { orbitals: CMat::zeros(n_sites, 0) }
    }

    /// Orbitals of a pure covariance (eigenvectors of `conj(C)` with eigenvalue near 1).
    pub fn from_state(state: &CovarianceState) -> Result<Self, TrajectoryError> {
        let count = state
            .n_excitations
            .ok_or_else(|| TrajectoryError::Domain("orbitals need a pure state".into()))?;
        let (_, vectors) = chain_core::linalg::hermitian_eigen(&state.matrix.map(|z| z.conj()));
        let n = state.dim();
        Ok(Self { orbitals: vectors.columns(n - count, count).into_owned() })
    }

    pub fn sites(&self) -> usize {
        self.orbitals.nrows()
    }

    pub fn particles(&self) -> usize {
        self.orbitals.ncols()
    }

    pub fn orbitals(&self) -> &CMat {
        &self.orbitals
    }

    pub fn occupation(&self, site: usize) -> f64 {
        self.orbitals.row(site).norm_squared()
    }

    pub fn covariance(&self) -> CovarianceState {
        let p = &self.orbitals * self.orbitals.adjoint();
        CovarianceState { matrix: p.map(|z| z.conj()), n_excitations: Some(self.particles()) }
    }

    /// Rates `(LeftIn, LeftOut, RightIn, RightOut)`.
    pub fn rates(&self, hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> [f64; 4] {
        let rates = hamiltonian.rates();
        let first = self.occupation(0).clamp(0.0, 1.0);
        let last = self.occupation(self.sites() - 1).clamp(0.0, 1.0);
        [
            rates.left * occupations.left * (1.0 - first),
            rates.left * (1.0 - occupations.left) * first,
            rates.right * occupations.right * (1.0 - last),
            rates.right * (1.0 - occupations.right) * last,
        ]
    }

    /// Applies a jump: removal drops the orbital direction overlapping the
    /// end site, addition appends the orthogonalized site vector.
    pub fn jump(&self, kind: JumpKind) -> Result<Self, TrajectoryError> {
        let n = self.sites();
        let site = match kind {
            JumpKind::LeftIn | JumpKind::LeftOut => 0,
            JumpKind::RightIn | JumpKind::RightOut => n - 1,
        };
        let overlap = self.occupation(site);
        let orbitals = match kind {
            JumpKind::LeftOut | JumpKind::RightOut => {
                if overlap < JUMP_TOLERANCE {
                    return Err(TrajectoryError::ImpossibleJump { kind, weight: overlap });
                }
                let m = self.particles();
                let u = self.orbitals.row(site).adjoint() / Complex64::new(overlap.sqrt(), 0.0);
                let phase = if u[0].norm() > 0.0 { u[0] / u[0].norm() } else { Complex64::new(1.0, 0.0) };
                let mut w = u.clone();
                w[0] += phase;
                let reflector = CMat::identity(m, m) - &w * w.adjoint() * Complex64::new(2.0 / w.norm_squared(), 0.0);
                (&self.orbitals * reflector).columns(1, m - 1).into_owned()
            }
            JumpKind::LeftIn | JumpKind::RightIn => {
                if 1.0 - overlap < JUMP_TOLERANCE {
                    return Err(TrajectoryError::ImpossibleJump { kind, weight: 1.0 - overlap });
                }
                let mut added = -&self.orbitals * self.orbitals.row(site).adjoint();
                added[site] += Complex64::new(1.0, 0.0);
                let norm = added.norm();
                let m = self.particles();
                let mut grown = self.orbitals.clone().insert_column(m, Complex64::new(0.0, 0.0));
                grown.set_column(m, &(added / Complex64::new(norm, 0.0)));
                orthonormalize(grown).0
            }
        };
        Ok(Self { orbitals })
    }
}

enum Evolution {
    Spectral(EigenDecomposition),
    Dense(CMat),
}

/// Samples jump times exactly from the no-jump survival probability
/// `S(t) = det(Phi(t)^dagger Phi(t)) e^{-c t}`, `Phi(t) = e^{-iGt} Phi`, with
/// `G = h - i/2 (kappa_L Pi_1 + kappa_R Pi_N)`.
pub struct WaitingTimeSampler {
    evolution: Evolution,
    coarse: CMat,
    coarse_step: f64,
    constant: f64,
    kappa_left: f64,
    kappa_right: f64,
}

impl WaitingTimeSampler {
    pub fn new(hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> Result<Self, TrajectoryError> {
        let n = hamiltonian.dim();
        let rates = hamiltonian.rates();
        let kappa_left = rates.left * (1.0 - 2.0 * occupations.left);
        let kappa_right = rates.right * (1.0 - 2.0 * occupations.right);
        let mut g = hamiltonian.hermitian_part();
        g[(0, 0)] -= Complex64::new(0.0, kappa_left / 2.0);
        g[(n - 1, n - 1)] -= Complex64::new(0.0, kappa_right / 2.0);
        let generator = g * Complex64::new(0.0, -1.0);
        let coarse_step = 1.0 / (rates.left + rates.right);
        let coarse = expm(&(&generator * Complex64::new(coarse_step, 0.0)));
        let evolution = match EigenDecomposition::new(&generator) {
            Ok(dec) if dec.condition() < CONDITION_LIMIT => Evolution::Spectral(dec),
            _ => Evolution::Dense(generator),
        };
        Ok(Self {
            evolution,
            coarse,
            coarse_step,
            constant: rates.left * occupations.left + rates.right * occupations.right,
            kappa_left,
            kappa_right,
        })
    }

    fn total_rate(&self, orbitals: &CMat) -> f64 {
        let n = orbitals.nrows();
        self.constant + self.kappa_left * orbitals.row(0).norm_squared() + self.kappa_right * orbitals.row(n - 1).norm_squared()
    }

    /// Normalized orbitals after a no-jump interval `elapsed`, and the log survival.
    pub fn evolve(&self, state: &Slater, elapsed: f64) -> (Slater, f64) {
        let moved = match &self.evolution {
            Evolution::Spectral(dec) => {
                let mut modal = &dec.inverse * &state.orbitals;
                for (mut row, l) in modal.row_iter_mut().zip(&dec.values) {
                    row *= (l * elapsed).exp();
                }
                &dec.vectors * modal
            }
            Evolution::Dense(generator) => expm(&(generator * Complex64::new(elapsed, 0.0))) * &state.orbitals,
        };
        let (orbitals, log_gram) = orthonormalize(moved);
        (Slater { orbitals }, log_gram - self.constant * elapsed)
    }

    /// Draws the next jump: the waiting time and the normalized state just
    /// before the jump, or `None` if no jump occurs within `horizon`.
    pub fn next_jump<R: Rng>(&self, state: &Slater, horizon: f64, rng: &mut R) -> Option<(f64, Slater)> {
        let target = (1.0 - rng.random::<f64>()).ln();
        let mut elapsed = 0.0;
        let mut log_survival = 0.0;
        let mut current = state.clone();
        loop {
            if elapsed >= horizon {
                return None;
            }
            let (next, log_gram) = orthonormalize(&self.coarse * &current.orbitals);
            let step = log_gram - self.constant * self.coarse_step;
            if log_survival + step > target {
                log_survival += step;
                current = Slater { orbitals: next };
                elapsed += self.coarse_step;
                continue;
            }
            let offset = self.solve_within(&current, log_survival - target, step);
            let (moved, _) = self.evolve(&current, offset);
            let wait = elapsed + offset;
            return (wait <= horizon).then_some((wait, moved));
        }
    }

    /// Root in `[0, coarse_step]` of `excess + log S(x)`, with `excess >= 0`
    /// and `excess + end <= 0`; safeguarded Newton on the decreasing log survival.
    fn solve_within(&self, start: &Slater, excess: f64, end: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.coarse_step);
        let (mut g_lo, mut g_hi) = (excess, excess + end);
        let mut x = if g_lo - g_hi > 0.0 { hi * g_lo / (g_lo - g_hi) } else { 0.0 };
        for _ in 0..100 {
            let (moved, log_s) = self.evolve(start, x);
            let g = excess + log_s;
            if g.abs() <= ROOT_TOLERANCE * (1.0 + excess.abs()) {
                return x;
            }
            if g > 0.0 {
                (lo, g_lo) = (x, g);
            } else {
                (hi, g_hi) = (x, g);
            }
            if hi - lo <= ROOT_TOLERANCE * self.coarse_step {
                break;
            }
            let rate = self.total_rate(moved.orbitals());
            let newton = x + g / rate.max(f64::MIN_POSITIVE);
            x = if rate > 0.0 && newton > lo && newton < hi {
                newton
            } else if g_lo - g_hi > 0.0 {
                let secant = lo + (hi - lo) * g_lo / (g_lo - g_hi);
                if secant > lo && secant < hi { secant } else { 0.5 * (lo + hi) }
            } else {
                0.5 * (lo + hi)
            };
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{apply_jump, RiccatiFlow};
    use chain_core::ChainSpec;

    fn random_pure(n: usize, m: usize, seed: u64) -> Slater {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = CMat::from_fn(n, m, |_, _| Complex64::new(next(), next()));
        Slater { orbitals: orthonormalize(a).0 }
    }

    #[test]
    fn jumps_match_covariance_updates() {
        let slater = random_pure(5, 2, 3);
        for kind in JumpKind::ALL {
            let via_orbitals = slater.jump(kind).unwrap().covariance();
            let via_matrix = apply_jump(&slater.covariance(), kind).unwrap();
            assert!((via_orbitals.matrix - via_matrix.matrix).camax() < 1e-12, "{kind:?}");
            assert_eq!(via_orbitals.n_excitations, via_matrix.n_excitations);
        }
        assert!(matches!(Slater::vacuum(3).jump(JumpKind::RightOut), Err(TrajectoryError::ImpossibleJump { .. })));
    }

    #[test]
    fn orbital_flow_matches_riccati() {
        let spec = ChainSpec::new(vec![0.6, 0.4, 0.9, 0.5]).unwrap().with_entropy(1.5).unwrap();
        let h = EffectiveHamiltonian::build(&spec, Some(&[0.1, 0.0, -0.2, 0.3, 0.0])).unwrap();
        let sampler = WaitingTimeSampler::new(&h, spec.occupations()).unwrap();
        let flow = RiccatiFlow::new(&h, spec.occupations());
        let start = random_pure(5, 2, 8);
        let mut c = start.covariance().matrix;
        let dt = 1e-3;
        for _ in 0..2000 {
            c = flow.step(&c, dt);
        }
        let (moved, _) = sampler.evolve(&start, 2.0);
        assert!((moved.covariance().matrix - c).camax() < 1e-10);
    }

    #[test]
    fn survival_derivative_is_the_total_rate() {
        let spec = ChainSpec::new(vec![0.6, 0.4, 0.9]).unwrap().with_entropy(2.0).unwrap();
        let h = EffectiveHamiltonian::clean(&spec);
        let sampler = WaitingTimeSampler::new(&h, spec.occupations()).unwrap();
        let start = random_pure(4, 2, 5);
        let (at, _) = sampler.evolve(&start, 0.7);
        let eps = 1e-5;
        let slope = (sampler.evolve(&start, 0.7 + eps).1 - sampler.evolve(&start, 0.7 - eps).1) / (2.0 * eps);
        let total: f64 = at.rates(&h, spec.occupations()).iter().sum();
        assert!((slope + total).abs() < 1e-8, "{slope} vs {total}");
    }

    #[test]
    fn sampled_time_solves_the_survival_equation() {
        use rand::SeedableRng;
        let spec = ChainSpec::uniform(3, 0.5).unwrap();
        let h = EffectiveHamiltonian::clean(&spec);
        let sampler = WaitingTimeSampler::new(&h, spec.occupations()).unwrap();
        let start = random_pure(3, 1, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut replay = rng.clone();
        for _ in 0..50 {
            let (wait, _) = sampler.next_jump(&start, f64::INFINITY, &mut rng).unwrap();
            let target = (1.0 - replay.random::<f64>()).ln();
            assert!((sampler.evolve(&start, wait).1 - target).abs() < 1e-11);
        }
    }
}
