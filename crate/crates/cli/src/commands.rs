use chain_core::{ChainDocument, EffectiveHamiltonian};
use experiments::{log_integers, ExperimentConfig, ExperimentOutcome};
use landauer::{Bias, QuadratureOptions};
use moments::MomentModel;
use serde::Serialize;
use trajectories::{Integrator, Stop, TickRecord, WaitingHistograms, WaitingRow};

use crate::args::{
    AsymptoticsArgs, ExperimentArgs, Method, OptimizeArgs, Quantity, SimulateArgs, TransportArgs, ValidateArgs,
    VarianceArgs,
};
use crate::error::CliError;
use crate::grid::{parse_grid, slopes};
use crate::run::{load_chain, read_file, resolve_seed, sha256_hex, Run};

/// Points of the default transmission grid.
const ENERGY_POINTS: usize = 401;
/// Points of the `T_n` grid of `simulate`.
const TICK_GRID_POINTS: usize = 25;

/// Hash identifying a handler's inputs, and `(failed, total)` when
/// acceptance checks did not all pass.
pub struct Done {
    pub config_hash: String,
    pub failed_checks: Option<(usize, usize)>,
}

impl Done {
    fn new(key: &str) -> Self {
        Self { config_hash: sha256_hex(key.as_bytes()), failed_checks: None }
    }
}

pub type Outcome = Result<Done, CliError>;

#[derive(Serialize)]
struct OptimizeReport {
    objective: f64,
    iterations: usize,
    converged: bool,
    current: f64,
    diffusion: f64,
    window_stats: optimizer::ApodizationReport,
}

pub fn optimize(args: &OptimizeArgs, seed: Option<u64>, run: &mut Run) -> Outcome {
    let (seed, source) = resolve_seed(seed, None);
    run.set_seed(seed, source);
    let profile = optimizer::optimize_couplings(args.n, args.gamma, args.window, args.budget, seed)?;
    let spec = profile.spec(args.gamma)?.with_seed(Some(seed));
    let transport = landauer::transport_zero_t(&EffectiveHamiltonian::clean(&spec))?;
    run.write_json("chain.json", &ChainDocument::from(spec))?;
    run.write_json(
        "report.json",
        &OptimizeReport {
            objective: profile.objective,
            iterations: profile.iterations,
            converged: profile.converged,
            current: transport.current,
            diffusion: transport.diffusion,
            window_stats: optimizer::apodization_report(&profile),
        },
    )?;
    let key = format!("optimize n={} gamma={} window={:?} budget={} seed={seed}", args.n, args.gamma, args.window, args.budget);
    Ok(Done::new(&key))
}

#[derive(Serialize)]
struct TransportReport {
    #[serde(rename = "J")]
    current: f64,
    #[serde(rename = "D")]
    diffusion: f64,
    fano: f64,
    method: &'static str,
    /// Relative quadrature tolerance; `null` for the residue sums.
    tolerance: Option<f64>,
}

pub fn transport(args: &TransportArgs, run: &mut Run) -> Outcome {
    let (_, spec, bytes) = load_chain(&args.config)?;
    let bias = match (args.mu_l, args.mu_r, args.beta) {
        (None, None, None) => Bias::full(),
        (l, r, beta) => Bias::new(l.unwrap_or(f64::INFINITY), r.unwrap_or(f64::NEG_INFINITY), beta.unwrap_or(f64::INFINITY))?,
    };
    let full = bias == Bias::full();
    if !spec.occupations().is_full_bias() {
        eprintln!("note: lead bias comes from --mu-l, --mu-r and --beta; the document's occupations are not used");
    }
    let method = args.method.unwrap_or(if full { Method::Residue } else { Method::Quadrature });
    let h = EffectiveHamiltonian::clean(&spec);
    let options = QuadratureOptions::default();
    let (summary, name, tolerance) = match method {
        Method::Residue if !full => return Err(CliError::Usage("the residue route needs full bias; use --method quadrature".into())),
        Method::Residue => (landauer::transport_zero_t(&h)?, "residue", None),
        Method::Quadrature => (landauer::lb_numeric(&h, bias, options)?, "quadrature", Some(options.rel_tol)),
    };
    let energies = match &args.energy_grid {
        Some(text) => parse_grid(text)?,
        None => {
            let cut = landauer::band_cutoff(&h);
            parse_grid(&format!("{}:{cut}:{ENERGY_POINTS}", -cut))?
        }
    };
    let rows = energies
        .iter()
        .map(|&e| Ok(vec![e, landauer::transmission(&h, e)?]))
        .collect::<Result<Vec<_>, CliError>>()?;
    run.write_csv("transmission.csv", &["energy", "transmission"], &rows)?;
    run.write_json(
        "summary.json",
        &TransportReport { current: summary.current, diffusion: summary.diffusion, fano: summary.fano, method: name, tolerance },
    )?;
    let key = format!("{} bias={bias:?} method={name} grid={:?}", sha256_hex(&bytes), args.energy_grid);
    Ok(Done::new(&key))
}

#[derive(Serialize)]
struct SimulationReport {
    #[serde(rename = "J_hat")]
    current_estimate: f64,
    current_stderr: f64,
    exact_current: f64,
    trajectories: usize,
    ticks: Vec<usize>,
    discard_first: usize,
    integrator: Integrator,
    var_table: Vec<WaitingRow>,
    histograms: Option<WaitingHistograms>,
    notes: Vec<String>,
}

fn rate_estimate(records: &[TickRecord]) -> (f64, f64) {
    let ticks: usize = records.iter().map(|r| r.tick_times.len()).sum();
    let time: f64 = records.iter().map(|r| r.t_end).sum();
    let rates: Vec<f64> = records.iter().filter(|r| r.t_end > 0.0).map(|r| r.tick_times.len() as f64 / r.t_end).collect();
    let (_, stderr) = experiments::mean_and_error(&rates);
    (ticks as f64 / time, stderr)
}

pub fn simulate(args: &SimulateArgs, seed: Option<u64>, run: &mut Run) -> Outcome {
    let (doc, spec, bytes) = load_chain(&args.config)?;
    let (seed, source) = resolve_seed(seed, doc.seed);
    run.set_seed(seed, source);
    if args.trajectories == 0 {
        return Err(CliError::Usage("--trajectories must be at least 1".into()));
    }
    let integrator = match args.dt {
        Some(dt) => Integrator::FixedStep { dt, reproject_every: args.reproject_every },
        None => Integrator::WaitingTime,
    };
    let stop = match (args.ticks, args.t_max) {
        (Some(n), _) => Stop::ticks(n),
        (None, Some(t)) => Stop::time(t),
        (None, None) => return Err(CliError::Usage("simulate needs --ticks or --t-max".into())),
    };
    let records = trajectories::simulate_ensemble(
        &EffectiveHamiltonian::clean(&spec),
        spec.occupations(),
        stop,
        integrator,
        seed,
        args.trajectories,
    )?;
    let width = records.len().to_string().len().max(4);
    for (index, record) in records.iter().enumerate() {
        let rows: Vec<Vec<f64>> = record.tick_times.iter().map(|t| vec![*t]).collect();
        run.write_csv(&format!("trajectory_{index:0width$}.csv"), &["tick_time"], &rows)?;
    }

    let mut notes = Vec::new();
    let shortest = records.iter().map(|r| r.tick_times.len()).min().unwrap_or(0);
    let largest_n = shortest.saturating_sub(args.discard_first + 1) / 2;
    let var_table = if largest_n >= 1 {
        trajectories::waiting_time_stats(&records, &log_integers(1, largest_n, TICK_GRID_POINTS), args.discard_first)?
    } else {
        notes.push(format!("shortest trajectory has {shortest} ticks; none left for T_n after discarding {}", args.discard_first));
        Vec::new()
    };
    let histograms = match trajectories::conditional_waiting_histogram(&records, args.discard_first) {
        Ok(h) => Some(h),
        Err(e) => {
            notes.push(format!("waiting-time histograms skipped: {e}"));
            None
        }
    };
    let (current_estimate, current_stderr) = rate_estimate(&records);
    run.write_json(
        "aggregate.json",
        &SimulationReport {
            current_estimate,
            current_stderr,
            exact_current: MomentModel::from_spec(&spec)?.current(),
            trajectories: records.len(),
            ticks: records.iter().map(|r| r.tick_times.len()).collect(),
            discard_first: args.discard_first,
            integrator,
            var_table,
            histograms,
            notes,
        },
    )?;
    let key = format!(
        "{} stop={stop:?} trajectories={} integrator={integrator:?} discard={} seed={seed}",
        sha256_hex(&bytes),
        args.trajectories,
        args.discard_first
    );
    Ok(Done::new(&key))
}

#[derive(Serialize)]
struct VarianceReport {
    #[serde(rename = "J")]
    current: f64,
    #[serde(rename = "D")]
    diffusion: f64,
    #[serde(rename = "A")]
    activity: f64,
    bond: Option<usize>,
}

pub fn variance(args: &VarianceArgs, run: &mut Run) -> Outcome {
    let (_, spec, bytes) = load_chain(&args.config)?;
    let times = parse_grid(&args.times)?;
    let model = MomentModel::from_spec(&spec)?;
    let curve = match args.bond {
        Some(k) => model.bond_number_variance(k, &times)?,
        None => model.number_variance(&times)?,
    };
    let slope = slopes(&curve.times, &curve.variance);
    let rows: Vec<Vec<f64>> = (0..times.len()).map(|i| vec![curve.times[i], curve.variance[i], slope[i]]).collect();
    run.write_csv("variance.csv", &["t", "var", "slope"], &rows)?;
    run.write_json(
        "summary.json",
        &VarianceReport { current: model.current(), diffusion: curve.diffusion, activity: curve.activity, bond: args.bond },
    )?;
    let key = format!("{} times={} bond={:?}", sha256_hex(&bytes), args.times, args.bond);
    Ok(Done::new(&key))
}

fn required(value: Option<f64>, flag: &str, what: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--what {what} needs {flag}")))
}

/// Table of one closed-form quantity; also printed to stdout.
pub fn asymptotics(args: &AsymptoticsArgs, run: &mut Run) -> Outcome {
    let g = args.g;
    let (header, rows): (Vec<&str>, Vec<Vec<f64>>) = match args.what {
        Quantity::Variance => (
            vec!["t", "variance", "asymptotic"],
            parse_grid(&args.times)?
                .into_iter()
                .map(|t| vec![t, asymptotics::bulk_variance_closed_form(g, t), asymptotics::bulk_variance_asymptotic(g, t)])
                .collect(),
        ),
        Quantity::Correlator => (
            vec!["tau", "correlator"],
            parse_grid(&args.times)?.into_iter().map(|tau| vec![tau, asymptotics::bulk_correlator(g, tau)]).collect(),
        ),
        Quantity::Crossover => {
            let current = required(args.current, "--current", "crossover")?;
            let diffusion = required(args.diffusion, "--diffusion", "crossover")?;
            let c = asymptotics::crossover_time(current, diffusion)?;
            let thermal = match args.sigma {
                Some(sigma) => asymptotics::thermal_crossover(current, sigma)?,
                None => f64::NAN,
            };
            (
                vec!["current", "diffusion", "t_star", "t_star_leading", "n_star", "t_star_thermal"],
                vec![vec![current, diffusion, c.lambert, c.leading, current * c.lambert, thermal]],
            )
        }
        Quantity::Localization => {
            let w = required(args.w, "--w", "localization")?;
            (
                vec!["energy", "localization_length"],
                parse_grid(&args.energies)?
                    .into_iter()
                    .map(|e| Ok(vec![e, asymptotics::localization_length(e, w, g)?]))
                    .collect::<Result<_, CliError>>()?,
            )
        }
    };
    let path = run.write_csv("asymptotics.csv", &header, &rows)?;
    print!("{}", std::fs::read_to_string(&path).map_err(|source| CliError::Read { path: path.clone(), source })?);
    let key = format!("{:?} g={g} times={} energies={} J={:?} D={:?} sigma={:?} w={:?}", args.what, args.times, args.energies, args.current, args.diffusion, args.sigma, args.w);
    Ok(Done::new(&key))
}

fn report_checks(outcome: &ExperimentOutcome) -> Option<(usize, usize)> {
    for check in &outcome.checks {
        let verdict = match (check.acceptance, check.passed) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        eprintln!("{verdict} {} value={} target={}", check.name, check.value, check.target);
    }
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    let deciding: Vec<_> = outcome.checks.iter().filter(|c| c.acceptance).collect();
    let failed = deciding.iter().filter(|c| !c.passed).count();
    (failed > 0).then_some((failed, deciding.len()))
}

/// Runs a campaign; `--out` replaces the config's `output_dir`, `--seed` its seed.
pub fn experiment(args: &ExperimentArgs, seed: Option<u64>, run: &mut Run) -> Outcome {
    let text = String::from_utf8(read_file(&args.config)?)
        .map_err(|e| CliError::Usage(format!("{} is not UTF-8: {e}", args.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    let (seed, source) = resolve_seed(seed, Some(config.seed));
    config.seed = seed;
    config.output_dir = run.dir().to_path_buf();
    run.set_seed(seed, source);
    let outcome = experiments::run(&config)?;
    let written = outcome.write(run.dir(), run.force())?;
    run.record(written);
    run.write_json("fits.json", &outcome.fits)?;
    Ok(Done { config_hash: config.hash(), failed_checks: report_checks(&outcome) })
}

pub fn validate(args: &ValidateArgs, seed: Option<u64>, run: &mut Run) -> Outcome {
    let (seed, source) = resolve_seed(seed, None);
    run.set_seed(seed, source);
    if args.n == 0 || args.n > moments::dense::MAX_SITES {
        return Err(CliError::Usage(format!("--n must be between 1 and {}", moments::dense::MAX_SITES)));
    }
    if args.instances == 0 {
        return Err(CliError::Usage("--instances must be at least 1".into()));
    }
    let entropies: Vec<Option<f64>> = std::iter::once(None).chain(args.entropies.iter().copied().map(Some)).collect();
    let report = experiments::validate_against_dense_oracle(args.n, &entropies, args.instances, seed)?;
    let rows: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| vec![r.n_sites as f64, r.entropy.unwrap_or(f64::INFINITY), r.instance as f64, r.covariance, r.current, r.activity, r.correlator])
        .collect();
    run.write_csv(
        "validation.csv",
        &["n_sites", "sigma", "instance", "covariance_dev", "current_dev", "activity_dev", "correlator_dev"],
        &rows,
    )?;
    run.write_json("report.json", &report)?;
    let key = format!("validate n={} entropies={:?} instances={} seed={seed}", args.n, args.entropies, args.instances);
    let failed = report.rows.iter().filter(|r| !r.passed()).count();
    Ok(Done { failed_checks: (failed > 0).then_some((failed, report.rows.len())), ..Done::new(&key) })
}
