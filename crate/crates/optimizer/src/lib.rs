//! Searches for coupling profiles that minimize the Fano factor `D/J`.
//!
//! Profiles are mirror-symmetric: one bulk coupling plus a window of boundary
//! couplings repeated at both ends. The search is a Nelder–Mead simplex in
//! log-coupling space with a few restarts.

mod fit;
mod simplex;

use chain_core::{ChainError, ChainSpec, EffectiveHamiltonian};
use landauer::LandauerError;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fit::{fit_power_law, PowerLawFit};
pub use simplex::{nelder_mead, SimplexOutcome, SimplexSettings};

pub const DEFAULT_BUDGET: usize = 4000;
pub const RESTARTS: usize = 3;
/// Initial simplex size in log-coupling space from the flat start.
const FLAT_STEP: f64 = 0.2;
/// Initial simplex size around a continued profile.
const WARM_STEP: f64 = 0.05;
/// Search box for each coupling, in units of the boundary rate. Far above the
/// rate, a strong bond binds its two sites into one effective site and the
/// search starts trading chain length for a near-degenerate spectrum.
pub const COUPLING_RANGE: (f64, f64) = (1e-2, 2.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("optimization needs at least two sites, got {0}")]
    TooShort(usize),
    #[error("window {window} exceeds half of the {couplings} couplings")]
    WindowTooWide { window: usize, couplings: usize },
    #[error("power-law fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("power-law fit needs positive data, got ({x}, {y})")]
    NonPositive { x: f64, y: f64 },
    #[error("x and y lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Transport(#[from] LandauerError),
}

/// Optimized couplings and how the search ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CouplingProfile {
    pub fn spec(&self, rate: f64) -> Result<ChainSpec, ChainError> {
        ChainSpec::new(self.values.clone())?.with_rate(rate)
    }
}

/// Mirror-symmetric profile family: bulk value plus `window` boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirroredProfile {
    n_couplings: usize,
    window: usize,
}

impl MirroredProfile {
    pub fn new(n_sites: usize, window: usize) -> Result<Self, OptimizerError> {
        if n_sites < 2 {
            return Err(OptimizerError::TooShort(n_sites));
        }
        let n_couplings = n_sites - 1;
        if window > n_couplings / 2 {
            return Err(OptimizerError::WindowTooWide { window, couplings: n_couplings });
        }
        Ok(Self { n_couplings, window })
    }

    /// Number of free parameters.
    pub fn dim(&self) -> usize {
        self.window + 1
    }

    /// `params[0]` is the bulk value, `params[k]` the k-th coupling from either end.
    pub fn expand(&self, params: &[f64]) -> Vec<f64> {
        let mut g = vec![params[0]; self.n_couplings];
        for k in 0..self.window {
            g[k] = params[k + 1];
            g[self.n_couplings - 1 - k] = params[k + 1];
        }
        g
    }
}

/// Fano factor of the full-bias chain with the given couplings; `+inf` when
/// the transport calculation fails.
pub fn fano(couplings: &[f64], rate: f64) -> f64 {
    let Ok(spec) = ChainSpec::new(couplings.to_vec()).and_then(|s| s.with_rate(rate)) else {
        return f64::INFINITY;
    };
    match landauer::transport_zero_t(&EffectiveHamiltonian::clean(&spec)) {
        Ok(s) if s.fano.is_finite() => s.fano,
        _ => f64::INFINITY,
    }
}

/// Chains up to this length are optimized directly from the flat profile.
const LADDER_BASE: usize = 10;

/// Chain lengths visited by the continuation, ending at `n_sites`: repeated
/// halving down to [`LADDER_BASE`] sites.
fn ladder(n_sites: usize) -> Vec<usize> {
    let mut sizes = vec![n_sites];
    while let Some(&last) = sizes.last() {
        if last <= LADDER_BASE {
            break;
        }
        sizes.push(last.div_ceil(2));
    }
    sizes.reverse();
    sizes
}

/// Maps log-parameters of a smaller chain onto a family with `dim` parameters;
/// boundary values keep their distance from the end, new ones take the value
/// of the middle coupling. When the window covers every coupling the bulk
/// slot is inert, so the middle coupling is the innermost boundary value.
fn warm_start(previous: &[f64], family: MirroredProfile, dim: usize) -> Vec<f64> {
    let middle = family.expand(previous)[family.n_couplings / 2];
    (0..dim).map(|k| if k == 0 { middle } else { previous.get(k).copied().unwrap_or(middle) }).collect()
}

/// Minimizes `D/J` over mirrored profiles of an `n_sites` chain.
///
/// `window` is the number of free boundary couplings per end (`None` frees
/// all of them). Chains longer than [`LADDER_BASE`] are reached by
/// continuation: the profile is first optimized for a chain of about
/// [`LADDER_BASE`] sites from the flat start `g = rate/2`, and each doubling
/// starts from the previous optimum. The final stage runs [`RESTARTS`]
/// searches: one from the continued profile, the others from log-uniform
/// perturbations of it drawn from the stream of `seed`.
///
/// `budget` caps objective evaluations per search. Couplings are confined to
/// [`COUPLING_RANGE`] times `rate`.
pub fn optimize_couplings(
    n_sites: usize,
    rate: f64,
    window: Option<usize>,
    budget: usize,
    seed: u64,
) -> Result<CouplingProfile, OptimizerError> {
    let family_for = |n: usize| MirroredProfile::new(n, window.unwrap_or(usize::MAX).min((n.max(2) - 1) / 2));
    let family = match window {
        Some(w) => MirroredProfile::new(n_sites, w)?,
        None => family_for(n_sites)?,
    };
    ChainSpec::uniform(n_sites, rate / 2.0)?.with_rate(rate)?;
    let (lo, hi) = ((COUPLING_RANGE.0 * rate).ln(), (COUPLING_RANGE.1 * rate).ln());
    let objective_for = |family: MirroredProfile| {
        move |x: &[f64]| {
            if x.iter().any(|v| !(lo..=hi).contains(v)) {
                return f64::INFINITY;
            }
            let params: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            fano(&family.expand(&params), rate)
        }
    };
    let settings = SimplexSettings { max_evaluations: budget, ..SimplexSettings::default() };

    let sizes = ladder(n_sites);
    let mut previous = family_for(sizes[0])?;
    let mut start = vec![(rate / 2.0).ln(); previous.dim()];
    let mut step = FLAT_STEP;
    let mut evaluations = 0;
    for &n in &sizes[..sizes.len() - 1] {
        let stage = family_for(n)?;
        let outcome = nelder_mead(&objective_for(stage), &warm_start(&start, previous, stage.dim()), step, settings);
        evaluations += outcome.evaluations;
        start = outcome.point;
        previous = stage;
        step = WARM_STEP;
    }
    let start = warm_start(&start, previous, family.dim());

    let objective = objective_for(family);
    let outcomes: Vec<SimplexOutcome> = (0..RESTARTS)
        .into_par_iter()
        .map(|restart| {
            let start = if restart == 0 {
                start.clone()
            } else {
                let mut rng = chain_core::sample_stream(seed, restart as u64);
                start.iter().map(|x| x + 2.0 * step * (rng.random::<f64>() - 0.5)).collect()
            };
            nelder_mead(&objective, &start, step, settings)
        })
        .collect();

    let (best, _) = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| (o, i))
        .min_by(|(a, i), (b, j)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one restart");
    let params: Vec<f64> = best.point.iter().map(|v| v.exp()).collect();
    Ok(CouplingProfile {
        values: family.expand(&params),
        objective: best.value,
        iterations: evaluations + outcomes.iter().map(|o| o.evaluations).sum::<usize>(),
        converged: best.converged,
    })
}

/// Shape summary of an optimized profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApodizationReport {
    pub bulk_value: f64,
    /// Couplings at one end that deviate by more than 5% from the bulk value.
    pub window_length: usize,
    /// First coupling over the bulk value.
    pub boundary_ratio: f64,
}

pub fn apodization_report(profile: &CouplingProfile) -> ApodizationReport {
    let g = &profile.values;
    let n = g.len();
    let (lo, hi) = (n / 3, (n - n / 3).max(n / 3 + 1).min(n));
    let mut centre: Vec<f64> = g[lo..hi].to_vec();
    centre.sort_by(f64::total_cmp);
    let m = centre.len();
    let bulk_value = if m % 2 == 1 { centre[m / 2] } else { 0.5 * (centre[m / 2 - 1] + centre[m / 2]) };
    let window_length = g[..n.div_ceil(2)]
        .iter()
        .rposition(|x| (x / bulk_value - 1.0).abs() > 0.05)
        .map_or(0, |i| i + 1);
    ApodizationReport { bulk_value, window_length, boundary_ratio: g[0] / bulk_value }
}
