use rand::Rng;

use crate::{ChainError, ChainSpec, SampleRng};

/// I.i.d. on-site shifts uniform on `[-width/2, width/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsiteDisorder {
    width: f64,
}

impl OnsiteDisorder {
    pub fn new(width: f64) -> Result<Self, ChainError> {
        if !width.is_finite() || width < 0.0 {
            return Err(ChainError::BadDisorderWidth(width));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Draws one shift per site; consumes exactly `n_sites` uniforms.
    pub fn sample(&self, spec: &ChainSpec, rng: &mut SampleRng) -> Vec<f64> {
        (0..spec.n_sites()).map(|_| self.width * (rng.random::<f64>() - 0.5)).collect()
    }

    pub fn apply(&self, spec: &ChainSpec, rng: &mut SampleRng) -> (ChainSpec, Vec<f64>) {
        (spec.clone(), self.sample(spec, rng))
    }
}

/// I.i.d. coupling perturbations uniform on `[-width/2, width/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingDisorder {
    width: f64,
}

impl CouplingDisorder {
    pub fn new(width: f64) -> Result<Self, ChainError> {
        if !width.is_finite() || width < 0.0 {
            return Err(ChainError::BadDisorderWidth(width));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Perturbed copy of `spec`. Widths that could produce a non-positive
    /// coupling are rejected before any draw.
    pub fn apply(&self, spec: &ChainSpec, rng: &mut SampleRng) -> Result<ChainSpec, ChainError> {
        if let Some(min_coupling) = spec.min_coupling() {
            if self.width >= 2.0 * min_coupling {
                return Err(ChainError::DisorderTooStrong { width: self.width, min_coupling });
            }
        }
        let couplings = spec
            .couplings()
            .iter()
            .map(|g| g + self.width * (rng.random::<f64>() - 0.5))
            .collect();
        spec.with_couplings(couplings)
    }
}
