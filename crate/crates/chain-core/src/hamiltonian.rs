use num_complex::Complex64;

use crate::{BoundaryRates, ChainError, ChainSpec, CMat};

/// Non-Hermitian one-body generator of the chain in the single-excitation
/// sector: couplings on the off-diagonals, on-site shifts on the diagonal and
/// `-i rate/2` damping on the two end sites.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    couplings: Vec<f64>,
    shifts: Vec<f64>,
    rates: BoundaryRates,
}

impl EffectiveHamiltonian {
    pub fn build(spec: &ChainSpec, shifts: Option<&[f64]>) -> Result<Self, ChainError> {
        let n = spec.n_sites();
        let shifts = match shifts {
            Some(s) if s.len() != n => return Err(ChainError::DetuningCount { expected: n, got: s.len() }),
            Some(s) => s.to_vec(),
            None => vec![0.0; n],
        };
        Ok(Self { couplings: spec.couplings().to_vec(), shifts, rates: spec.rates() })
    }

    /// Clean chain with no on-site shifts.
    pub fn clean(spec: &ChainSpec) -> Self {
        Self { couplings: spec.couplings().to_vec(), shifts: vec![0.0; spec.n_sites()], rates: spec.rates() }
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn rates(&self) -> BoundaryRates {
        self.rates
    }

    /// Damping added to the diagonal: `-i rate_L/2` at the first site and `-i rate_R/2` at the last.
    pub fn damping(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        d[0] -= self.rates.left / 2.0;
        let last = self.dim() - 1;
        d[last] -= self.rates.right / 2.0;
        d
    }

    /// Dense `h_eff`.
    pub fn matrix(&self) -> CMat {
        let mut m = self.hermitian_part();
        for (i, d) in self.damping().into_iter().enumerate() {
            m[(i, i)].im += d;
        }
        m
    }

    /// Real symmetric part `h`: couplings and shifts only.
    pub fn hermitian_part(&self) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for (i, &w) in self.shifts.iter().enumerate() {
            m[(i, i)] = Complex64::new(w, 0.0);
        }
        for (i, &g) in self.couplings.iter().enumerate() {
            m[(i, i + 1)] = Complex64::new(g, 0.0);
            m[(i + 1, i)] = Complex64::new(g, 0.0);
        }
        m
    }

    /// Operator norm bound used for relative tolerances.
    pub fn scale(&self) -> f64 {
        let g = self.couplings.iter().copied().fold(0.0, f64::max);
        let w = self.shifts.iter().map(|x| x.abs()).fold(0.0, f64::max);
        2.0 * g + w + self.rates.left.max(self.rates.right)
    }
}
