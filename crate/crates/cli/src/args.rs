use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Output schema version of the files this binary writes.
pub const FORMAT_VERSION: &str = "1";
/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_VAR: &str = "TICKCHAIN_OUTPUT_ROOT";

const LONG_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (output format ", "1", ")");

#[derive(Debug, Parser)]
#[command(name = "tickchain", version, long_version = LONG_VERSION, about = "Boundary-driven fermionic clock chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed; overrides any seed in the config. Drawn at random and recorded when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory; defaults to `<root>/<subcommand>`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Root for default output directories.
    #[arg(long, global = true, env = OUTPUT_ROOT_VAR, default_value = "runs")]
    pub output_root: PathBuf,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the Fano factor over mirrored coupling profiles.
    Optimize(OptimizeArgs),
    /// Landauer current, diffusion and transmission of a chain.
    Transport(TransportArgs),
    /// Quantum-jump trajectories of the tick clock.
    Simulate(SimulateArgs),
    /// Exact counting variance on a time grid.
    Variance(VarianceArgs),
    /// Closed-form laws of the infinite chain and cross-over times.
    Asymptotics(AsymptoticsArgs),
    /// Config-driven campaign.
    Experiment(ExperimentArgs),
    /// Compare the covariance route with the many-body generator.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Optimize(_) => "optimize",
            Self::Transport(_) => "transport",
            Self::Simulate(_) => "simulate",
            Self::Variance(_) => "variance",
            Self::Asymptotics(_) => "asymptotics",
            Self::Experiment(_) => "experiment",
            Self::Validate(_) => "validate",
        }
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: usize,
    /// Boundary rate.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Free boundary couplings per end; all when absent.
    #[arg(long)]
    pub window: Option<usize>,
    /// Objective evaluations per search.
    #[arg(long, default_value_t = optimizer::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Residue,
    Quadrature,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    /// Chain document (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Transmission grid `min:max:steps`; defaults to the band edges with 401 points.
    #[arg(long, allow_hyphen_values = true)]
    pub energy_grid: Option<String>,
    /// Inverse lead temperature; zero temperature when absent.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Left chemical potential; infinite when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub mu_l: Option<f64>,
    /// Right chemical potential; minus infinity when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub mu_r: Option<f64>,
    /// Residue calculus needs full bias; defaults to it there and to quadrature otherwise.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Chain document (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, conflicts_with = "t_max", required_unless_present = "t_max")]
    pub ticks: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 16)]
    pub trajectories: usize,
    /// Fixed-step integration with this step; exact jump-time sampling when absent.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Re-projection cadence of fixed stepping.
    #[arg(long, requires = "dt", default_value_t = trajectories::DEFAULT_REPROJECT_EVERY)]
    pub reproject_every: usize,
    /// Ticks dropped before stationary statistics.
    #[arg(long, default_value_t = trajectories::DEFAULT_DISCARD)]
    pub discard_first: usize,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    /// Chain document (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Time grid `log:t0:t1:steps`.
    #[arg(long, default_value = "log:0.1:1000:41")]
    pub times: String,
    /// Bond `k` counted from the right end, `1 <= k < N`; the right lead when absent.
    #[arg(long)]
    pub bond: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Bulk-bond variance, closed form and log asymptote.
    Variance,
    /// Bulk-bond current correlator.
    Correlator,
    /// Cross-over time from `J` and `D`, optionally the thermal one.
    Crossover,
    /// Localization length against energy.
    Localization,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, value_enum)]
    pub what: Quantity,
    /// Bulk coupling.
    #[arg(long, default_value_t = 0.5)]
    pub g: f64,
    /// Time or lag grid `log:t0:t1:steps` or `min:max:steps`.
    #[arg(long, default_value = "log:0.1:1000:41")]
    pub times: String,
    #[arg(long)]
    pub current: Option<f64>,
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Entropy per tick for the thermal cross-over.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// On-site disorder width.
    #[arg(long)]
    pub w: Option<f64>,
    /// Energy grid `min:max:steps`.
    #[arg(long, default_value = "-0.9:0.9:19", allow_hyphen_values = true)]
    pub energies: String,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Chain length, at most 4.
    #[arg(long)]
    pub n: usize,
    /// Finite-bias entropies checked besides full bias.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0])]
    pub entropies: Vec<f64>,
    /// Random instances per bias setting.
    #[arg(long, default_value_t = 2)]
    pub instances: usize,
}
