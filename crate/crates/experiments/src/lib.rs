//! Config-driven campaigns over optimized chains: Fano scaling, disorder
//! and thermal sweeps, cross-over checks and dense-oracle validation.
//!
//! Every campaign returns an [`ExperimentOutcome`] of result tables, fits
//! and checks. Table cells depend only on the configuration and its master
//! seed; each grid cell draws from its own RNG stream.

mod clock;
mod config;
mod disorder;
mod error;
mod outcome;
mod scaling;
mod stats;
mod table;
mod thermal;
mod validate;

pub use clock::{crossover_log_law, departure_tick, simulate_clock, tick_grid, tick_variance, DEPARTURE_SEARCH_START};
pub use config::{ExperimentConfig, ExperimentKind, MonteCarloSettings, OptimizerSettings, Sweep, CAMPAIGN_BUDGET};
pub use disorder::{disordered_transport, run_disorder, DisorderKind, DISORDER_EXPONENT, PREFACTOR_EXPONENT};
pub use error::ExperimentError;
pub use outcome::{Check, Comparison, ExperimentOutcome, NamedFit};
pub use scaling::{optimized_chain, run_scaling, SCALING_EXPONENT};
pub use stats::{cell_seed, cell_stream, log_integers, mean_and_error};
pub use table::{json_with_newline, write_atomic, Column, Manifest, ResultTable, ERROR_CONVENTION};
pub use thermal::{
    linear_slope, run_crossover, run_thermal, CURRENT_TOLERANCE, DEPARTURE_FACTOR, IDENTITY_TOLERANCE, THERMAL_SLOPE,
    THERMAL_SLOPE_RANGE,
};
pub use validate::{
    oracle_instance, run_validate, validate_against_dense_oracle, ValidationReport, ValidationRow, CORRELATOR_TOLERANCE,
    ORACLE_TOLERANCE,
};

/// Runs the campaign named by `config.kind`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    match config.kind {
        ExperimentKind::Scaling => run_scaling(config),
        ExperimentKind::DisorderOnsite | ExperimentKind::DisorderCoupling => run_disorder(config),
        ExperimentKind::Thermal => run_thermal(config),
        ExperimentKind::Crossover => run_crossover(config),
        ExperimentKind::Validate => run_validate(config),
    }
}
