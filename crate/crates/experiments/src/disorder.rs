use std::time::Instant;

use chain_core::{sample_stream, ChainSpec, CouplingDisorder, EffectiveHamiltonian, OnsiteDisorder};
use landauer::{transport_zero_t, TransportSummary};
use rayon::prelude::*;

use crate::outcome::{Check, ExperimentOutcome, NamedFit};
use crate::scaling::{expect_kind, fit_two_or_more, optimized_chain};
use crate::stats::{cell_stream, mean_and_error};
use crate::table::{Manifest, ResultTable};
use crate::{ExperimentConfig, ExperimentError, ExperimentKind};

/// Disorder exponent of the excess noise and its desk-scale tolerance.
pub const DISORDER_EXPONENT: (f64, f64) = (2.0, 0.15);
/// Exponent of the coupling-disorder prefactor versus chain length.
pub const PREFACTOR_EXPONENT: (f64, f64) = (1.39, 0.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisorderKind {
    Onsite,
    Coupling,
}

impl DisorderKind {
    fn label(self) -> &'static str {
        match self {
            Self::Onsite => "onsite",
            Self::Coupling => "coupling",
        }
    }
}

/// Transport of one disorder realization; `width` is absolute.
pub fn disordered_transport(
    spec: &ChainSpec,
    kind: DisorderKind,
    width: f64,
    seed: u64,
    stream: u64,
) -> Result<TransportSummary, ExperimentError> {
    let mut rng = sample_stream(seed, stream);
    let hamiltonian = match kind {
        DisorderKind::Onsite => {
            let shifts = OnsiteDisorder::new(width)?.sample(spec, &mut rng);
            EffectiveHamiltonian::build(spec, Some(&shifts))?
        }
        DisorderKind::Coupling => EffectiveHamiltonian::clean(&CouplingDisorder::new(width)?.apply(spec, &mut rng)?),
    };
    Ok(transport_zero_t(&hamiltonian)?)
}

/// Disorder-averaged diffusion constants of optimized chains.
///
/// Each `(N, W/g)` cell draws `samples` realizations of width `W = s g`,
/// with `g` the bulk coupling of the clean optimum; the excess noise
/// `(D_W - D)/J` is fitted against `W/g` per chain length (strengths > 0).
pub fn run_disorder(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    expect_kind(config, &[ExperimentKind::DisorderOnsite, ExperimentKind::DisorderCoupling])?;
    let kind = if config.kind == ExperimentKind::DisorderOnsite { DisorderKind::Onsite } else { DisorderKind::Coupling };
    let started = Instant::now();
    let strengths = &config.sweep.strengths;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (n_index, &n) in config.sweep.n_sites.iter().enumerate() {
        let (profile, spec) = optimized_chain(config, n)?;
        let clean = transport_zero_t(&EffectiveHamiltonian::clean(&spec))?;
        let bulk = optimizer::apodization_report(&profile).bulk_value;
        for (s_index, &strength) in strengths.iter().enumerate() {
            let cell = (n_index * strengths.len() + s_index) as u64;
            let samples: Vec<TransportSummary> = (0..config.samples as u64)
                .into_par_iter()
                .map(|sample| disordered_transport(&spec, kind, strength * bulk, config.seed, cell_stream(cell, sample)))
                .collect::<Result<_, _>>()?;
            let diffusion: Vec<f64> = samples.iter().map(|s| s.diffusion).collect();
            let excess: Vec<f64> = diffusion.iter().map(|d| (d - clean.diffusion) / clean.current).collect();
            let fano: Vec<f64> = samples.iter().map(|s| s.fano).collect();
            let (d_mean, d_err) = mean_and_error(&diffusion);
            let (x_mean, x_err) = mean_and_error(&excess);
            let (f_mean, f_err) = mean_and_error(&fano);
            rows.push([
                n as f64,
                strength,
                strength * bulk,
                clean.diffusion,
                clean.current,
                d_mean,
                d_err,
                x_mean,
                x_err,
                f_mean,
                f_err,
                config.samples as f64,
            ]);
            cells.push((n, strength, x_mean, diffusion.iter().all(|d| *d == clean.diffusion)));
        }
    }

    let manifest = Manifest::new(config.hash(), config.seed, started.elapsed().as_secs_f64());
    let name = format!("disorder_{}", kind.label());
    let mut table = ResultTable::new(
        &name,
        &[
            "n_sites",
            "strength",
            "width",
            "clean_diffusion",
            "clean_current",
            "diffusion_mean",
            "diffusion_err",
            "excess_mean",
            "excess_err",
            "fano_mean",
            "fano_err",
            "samples",
        ],
        manifest,
    );
    for row in &rows {
        table.push_row(row)?;
    }

    let mut outcome = ExperimentOutcome::new();
    let mut prefactors = Vec::new();
    for &n in &config.sweep.n_sites {
        let mine: Vec<_> = cells.iter().filter(|c| c.0 == n).collect();
        for c in mine.iter().filter(|c| c.1 == 0.0) {
            outcome.checks.push(Check::absolute(format!("clean_row_n{n}"), f64::from(u8::from(c.3)), 1.0, 0.0));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = mine.iter().filter(|c| c.1 > 0.0).map(|c| (c.1, c.2)).unzip();
        match optimizer::fit_power_law(&xs, &ys) {
            Ok(fit) => {
                outcome.checks.push(Check::absolute(format!("alpha_n{n}"), fit.exponent, DISORDER_EXPONENT.0, DISORDER_EXPONENT.1));
                prefactors.push((n as f64, fit.prefactor));
                outcome.fits.push(NamedFit { name: format!("excess_vs_strength_n{n}"), fit });
            }
            Err(e) => outcome.notes.push(format!("N={n}: excess-noise fit skipped: {e}")),
        }
    }
    if prefactors.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = prefactors.into_iter().unzip();
        match fit_two_or_more(&xs, &ys) {
            Ok(fit) => {
                if kind == DisorderKind::Coupling {
                    outcome.checks.push(
                        Check::absolute("prefactor_exponent", fit.exponent, PREFACTOR_EXPONENT.0, PREFACTOR_EXPONENT.1)
                            .informational(),
                    );
                }
                outcome.fits.push(NamedFit { name: "prefactor_vs_n".into(), fit });
            }
            Err(e) => outcome.notes.push(format!("prefactor fit skipped: {e}")),
        }
    }
    outcome.tables = vec![table];
    Ok(outcome)
}
