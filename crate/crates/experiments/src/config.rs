use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use trajectories::{Integrator, DEFAULT_DISCARD};

use crate::ExperimentError;

/// Objective evaluations per optimizer search in campaigns.
pub const CAMPAIGN_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Scaling,
    DisorderOnsite,
    DisorderCoupling,
    Thermal,
    Crossover,
    Validate,
}

/// Parameter grid of a campaign.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub n_sites: Vec<usize>,
    /// Disorder widths in units of the bulk coupling.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strengths: Vec<f64>,
    /// Entropy per tick; full bias is always included as a reference.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entropies: Vec<f64>,
    /// Entropies with Monte Carlo curves; `None` means all of `entropies`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo_entropies: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub rate: f64,
    pub budget: usize,
    /// Free boundary couplings per end; `None` frees all.
    pub window: Option<usize>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { rate: 1.0, budget: CAMPAIGN_BUDGET, window: None }
    }
}

/// Trajectory settings; the number of trajectories is the config's `samples`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSettings {
    pub ticks: usize,
    pub discard: usize,
    pub integrator: Integrator,
    /// Also simulate the full-bias chain.
    pub include_clean: bool,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        Self { ticks: 2200, discard: DEFAULT_DISCARD, integrator: Integrator::WaitingTime, include_clean: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub sweep: Sweep,
    /// Disorder realizations, trajectories or oracle instances per grid cell.
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    #[serde(default)]
    pub monte_carlo: MonteCarloSettings,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_json(&std::fs::read_to_string(path).map_err(ExperimentError::io(path))?)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: String| Err(ExperimentError::Config(msg));
        if self.sweep.n_sites.is_empty() {
            return fail("sweep.n_sites is empty".into());
        }
        if self.samples == 0 {
            return fail("samples must be at least 1".into());
        }
        if let Some(&n) = self.sweep.n_sites.iter().find(|&&n| n == 0) {
            return fail(format!("chain length {n} in sweep.n_sites"));
        }
        if !(self.optimizer.rate > 0.0 && self.optimizer.rate.is_finite()) {
            return fail(format!("optimizer.rate must be positive, got {}", self.optimizer.rate));
        }
        match self.kind {
            ExperimentKind::Scaling | ExperimentKind::Crossover => {
                if let Some(&n) = self.sweep.n_sites.iter().find(|&&n| n < 2) {
                    return fail(format!("optimization needs at least two sites, got {n}"));
                }
            }
            ExperimentKind::DisorderOnsite | ExperimentKind::DisorderCoupling => {
                if self.sweep.strengths.is_empty() {
                    return fail("disorder sweeps need sweep.strengths".into());
                }
                if let Some(w) = self.sweep.strengths.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
                    return fail(format!("disorder strength {w} is not a finite non-negative number"));
                }
                if let Some(&n) = self.sweep.n_sites.iter().find(|&&n| n < 2) {
                    return fail(format!("optimization needs at least two sites, got {n}"));
                }
            }
            ExperimentKind::Thermal => {
                if self.sweep.entropies.is_empty() {
                    return fail("thermal sweeps need sweep.entropies".into());
                }
                if let Some(s) = self.sweep.entropies.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
                    return fail(format!("entropy {s} is not a finite positive number"));
                }
                if let Some(missing) = self
                    .sweep
                    .monte_carlo_entropies
                    .iter()
                    .flatten()
                    .find(|s| !self.sweep.entropies.contains(s))
                {
                    return fail(format!("Monte Carlo entropy {missing} is not in sweep.entropies"));
                }
            }
            ExperimentKind::Validate => {
                if let Some(&n) = self.sweep.n_sites.iter().find(|&&n| n > moments::dense::MAX_SITES) {
                    return fail(format!("the dense oracle supports at most {} sites, got {n}", moments::dense::MAX_SITES));
                }
                if let Some(s) = self.sweep.entropies.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
                    return fail(format!("entropy {s} is not a finite positive number"));
                }
            }
        }
        if matches!(self.kind, ExperimentKind::Thermal | ExperimentKind::Crossover) {
            let mc = &self.monte_carlo;
            if mc.ticks <= mc.discard + 1 {
                return fail(format!("monte_carlo.ticks ({}) must exceed discard ({}) + 1", mc.ticks, mc.discard));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form; changes with any field.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configs serialize");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
