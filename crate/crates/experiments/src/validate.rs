use std::time::Instant;

use chain_core::{sample_stream, ChainSpec, EffectiveHamiltonian};
use moments::dense::DenseLindblad;
use moments::MomentModel;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::outcome::{Check, ExperimentOutcome};
use crate::scaling::expect_kind;
use crate::stats::cell_stream;
use crate::table::{Manifest, ResultTable};
use crate::{ExperimentConfig, ExperimentError, ExperimentKind};

/// Max-norm agreement of covariance, current and activity.
pub const ORACLE_TOLERANCE: f64 = 1e-8;
/// Agreement of the current correlator, limited by the finite difference.
pub const CORRELATOR_TOLERANCE: f64 = 1e-6;
/// Step of the central second difference of the exact variance.
const CORRELATOR_STEP: f64 = 1e-3;
/// Lag at which the current correlator is compared.
const CORRELATOR_LAG: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub n_sites: usize,
    /// `None` for full bias.
    pub entropy: Option<f64>,
    pub instance: usize,
    pub covariance: f64,
    pub current: f64,
    pub activity: f64,
    pub correlator: f64,
}

impl ValidationRow {
    pub fn passed(&self) -> bool {
        self.covariance <= ORACLE_TOLERANCE
            && self.current <= ORACLE_TOLERANCE
            && self.activity <= ORACLE_TOLERANCE
            && self.correlator <= CORRELATOR_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub max_covariance: f64,
    pub max_current: f64,
    pub max_activity: f64,
    pub max_correlator: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ValidationRow::passed)
    }
}

/// Random chain of `n_sites` for one oracle instance: couplings in
/// `[0.3, 1)`, shifts in `[-0.3, 0.3)`, unit rates.
pub fn oracle_instance(n_sites: usize, entropy: Option<f64>, seed: u64, stream: u64) -> Result<(ChainSpec, Vec<f64>), ExperimentError> {
    let mut rng = sample_stream(seed, stream);
    let couplings: Vec<f64> = (1..n_sites).map(|_| 0.3 + 0.7 * rng.random::<f64>()).collect();
    let shifts: Vec<f64> = (0..n_sites).map(|_| 0.6 * (rng.random::<f64>() - 0.5)).collect();
    let spec = ChainSpec::new(couplings)?;
    let spec = match entropy {
        Some(sigma) => spec.with_entropy(sigma)?,
        None => spec,
    };
    Ok((spec, shifts))
}

/// Compares the covariance route with the many-body Lindblad generator on
/// one instance per `(entropy, instance)` pair; `n_sites <= 4`.
pub fn validate_against_dense_oracle(
    n_sites: usize,
    entropies: &[Option<f64>],
    instances: usize,
    seed: u64,
) -> Result<ValidationReport, ExperimentError> {
    let mut rows = Vec::new();
    for (e_index, &entropy) in entropies.iter().enumerate() {
        for instance in 0..instances {
            let cell = (n_sites * 64 + e_index) as u64;
            let (spec, shifts) = oracle_instance(n_sites, entropy, seed, cell_stream(cell, instance as u64))?;
            let hamiltonian = EffectiveHamiltonian::build(&spec, Some(&shifts))?;
            let model = MomentModel::new(&hamiltonian, spec.occupations())?;
            let oracle = DenseLindblad::new(&hamiltonian, spec.occupations())?;
            let rho = oracle.steady_state()?;
            let step = CORRELATOR_STEP;
            let lag = CORRELATOR_LAG;
            let v = model.number_variance(&[0.0, lag - step, lag, lag + step])?.variance;
            let finite_difference = 0.5 * (v[1] - 2.0 * v[2] + v[3]) / (step * step);
            rows.push(ValidationRow {
                n_sites,
                entropy,
                instance,
                covariance: (model.covariance() - oracle.one_body(&rho)).camax(),
                current: (model.current() - oracle.right_current(&rho)).abs(),
                activity: (model.activity() - oracle.right_activity(&rho)).abs(),
                correlator: (finite_difference - oracle.jump_correlator(&rho, lag)).abs(),
            });
        }
    }
    let max = |f: fn(&ValidationRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(ValidationReport {
        max_covariance: max(|r| r.covariance),
        max_current: max(|r| r.current),
        max_activity: max(|r| r.activity),
        max_correlator: max(|r| r.correlator),
        rows,
    })
}

/// Campaign form of [`validate_against_dense_oracle`]: every chain length
/// of the grid at full bias plus each listed entropy.
pub fn run_validate(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    expect_kind(config, &[ExperimentKind::Validate])?;
    let started = Instant::now();
    let entropies: Vec<Option<f64>> = std::iter::once(None).chain(config.sweep.entropies.iter().copied().map(Some)).collect();
    let reports: Vec<ValidationReport> = config
        .sweep
        .n_sites
        .iter()
        .map(|&n| validate_against_dense_oracle(n, &entropies, config.samples, config.seed))
        .collect::<Result<_, _>>()?;
    let manifest = Manifest::new(config.hash(), config.seed, started.elapsed().as_secs_f64());
    let mut table = ResultTable::new(
        "validation",
        &["n_sites", "sigma", "instance", "covariance_dev", "current_dev", "activity_dev", "correlator_dev"],
        manifest,
    );
    let mut outcome = ExperimentOutcome::new();
    for report in &reports {
        for r in &report.rows {
            table.push_row(&[
                r.n_sites as f64,
                r.entropy.unwrap_or(f64::INFINITY),
                r.instance as f64,
                r.covariance,
                r.current,
                r.activity,
                r.correlator,
            ])?;
        }
        let n = report.rows.first().map_or(0, |r| r.n_sites);
        outcome.checks.push(Check::at_most(format!("covariance_n{n}"), report.max_covariance, ORACLE_TOLERANCE));
        outcome.checks.push(Check::at_most(format!("current_n{n}"), report.max_current, ORACLE_TOLERANCE));
        outcome.checks.push(Check::at_most(format!("activity_n{n}"), report.max_activity, ORACLE_TOLERANCE));
        outcome.checks.push(Check::at_most(format!("correlator_n{n}"), report.max_correlator, CORRELATOR_TOLERANCE));
    }
    outcome.tables = vec![table];
    Ok(outcome)
}
