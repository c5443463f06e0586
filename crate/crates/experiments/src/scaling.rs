use std::time::Instant;

use chain_core::{ChainSpec, EffectiveHamiltonian};
use optimizer::{fit_power_law, optimize_couplings, CouplingProfile, PowerLawFit};
use rayon::prelude::*;

use crate::outcome::{Check, ExperimentOutcome, NamedFit};
use crate::table::{Manifest, ResultTable};
use crate::{ExperimentConfig, ExperimentError, ExperimentKind};

/// Fano scaling exponent of optimized chains and its tolerance.
pub const SCALING_EXPONENT: (f64, f64) = (-1.86, 0.10);

/// Optimized full-bias chain of `n_sites` for the config's optimizer settings.
pub fn optimized_chain(config: &ExperimentConfig, n_sites: usize) -> Result<(CouplingProfile, ChainSpec), ExperimentError> {
    let o = config.optimizer;
    let profile = optimize_couplings(n_sites, o.rate, o.window, o.budget, config.seed)?;
    let spec = profile.spec(o.rate)?;
    Ok((profile, spec))
}

pub(crate) fn expect_kind(config: &ExperimentConfig, kinds: &[ExperimentKind]) -> Result<(), ExperimentError> {
    config.validate()?;
    if !kinds.contains(&config.kind) {
        return Err(ExperimentError::Config(format!("expected kind {kinds:?}, got {:?}", config.kind)));
    }
    Ok(())
}

/// Optimizes each chain length of the grid, records `D/J` and fits the
/// exponent. Fit failures (fewer than three lengths) are reported as notes.
pub fn run_scaling(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    expect_kind(config, &[ExperimentKind::Scaling])?;
    let started = Instant::now();
    let rows: Vec<(usize, CouplingProfile, landauer::TransportSummary)> = config
        .sweep
        .n_sites
        .par_iter()
        .map(|&n| -> Result<_, ExperimentError> {
            let (profile, spec) = optimized_chain(config, n)?;
            let transport = landauer::transport_zero_t(&EffectiveHamiltonian::clean(&spec))?;
            Ok((n, profile, transport))
        })
        .collect::<Result<_, _>>()?;

    let manifest = Manifest::new(config.hash(), config.seed, started.elapsed().as_secs_f64());
    let mut table = ResultTable::new(
        "scaling",
        &["n_sites", "fano", "current", "diffusion", "evaluations", "converged", "boundary_ratio", "window_length"],
        manifest,
    );
    let mut couplings = ResultTable::new("scaling_couplings", &["n_sites", "bond", "coupling"], table.manifest.clone());
    for (n, profile, transport) in &rows {
        let report = optimizer::apodization_report(profile);
        table.push_row(&[
            *n as f64,
            transport.fano,
            transport.current,
            transport.diffusion,
            profile.iterations as f64,
            f64::from(u8::from(profile.converged)),
            report.boundary_ratio,
            report.window_length as f64,
        ])?;
        for (bond, g) in profile.values.iter().enumerate() {
            couplings.push_row(&[*n as f64, bond as f64, *g])?;
        }
    }

    let mut outcome = ExperimentOutcome::new();
    let xs: Vec<f64> = rows.iter().map(|(n, ..)| *n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, _, t)| t.fano).collect();
    match fit_power_law(&xs, &ys) {
        Ok(fit) => {
            outcome.checks.push(Check::absolute("fano_exponent", fit.exponent, SCALING_EXPONENT.0, SCALING_EXPONENT.1));
            outcome.fits.push(NamedFit { name: "fano_vs_n".into(), fit });
        }
        Err(e) => outcome.notes.push(format!("power-law fit skipped: {e}")),
    }
    outcome.tables = vec![table, couplings];
    Ok(outcome)
}

/// Power law through two or more points; two points give the exact slope
/// with an undefined error.
pub(crate) fn fit_two_or_more(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit, ExperimentError> {
    if xs.len() == 2 && ys.len() == 2 && xs.iter().chain(ys).all(|v| *v > 0.0 && v.is_finite()) {
        let exponent = (ys[1] / ys[0]).ln() / (xs[1] / xs[0]).ln();
        return Ok(PowerLawFit { exponent, prefactor: ys[0] / xs[0].powf(exponent), exponent_err: f64::NAN });
    }
    Ok(fit_power_law(xs, ys)?)
}
