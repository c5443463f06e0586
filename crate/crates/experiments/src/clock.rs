use std::f64::consts::PI;

use chain_core::{ChainSpec, EffectiveHamiltonian};
use trajectories::{simulate_ensemble, waiting_time_stats, Stop, TickRecord, WaitingRow};

use crate::config::MonteCarloSettings;
use crate::stats::log_integers;
use crate::ExperimentError;

/// Points of the log-spaced `n` grid for `Var[T_n]`.
const TICK_GRID_POINTS: usize = 25;
/// Departures are looked for from this tick number on.
pub const DEPARTURE_SEARCH_START: usize = 10;

/// Tick numbers for `Var[T_n]`, leaving at least two blocks per trajectory
/// for the largest `n`.
pub fn tick_grid(settings: &MonteCarloSettings) -> Vec<usize> {
    let usable = settings.ticks - settings.discard - 1;
    log_integers(1, (usable / 2).max(1), TICK_GRID_POINTS)
}

pub fn simulate_clock(
    spec: &ChainSpec,
    settings: &MonteCarloSettings,
    seed: u64,
    trajectories: usize,
) -> Result<Vec<TickRecord>, ExperimentError> {
    Ok(simulate_ensemble(
        &EffectiveHamiltonian::clean(spec),
        spec.occupations(),
        Stop::ticks(settings.ticks),
        settings.integrator,
        seed,
        trajectories,
    )?)
}

pub fn tick_variance(records: &[TickRecord], settings: &MonteCarloSettings) -> Result<Vec<WaitingRow>, ExperimentError> {
    Ok(waiting_time_stats(records, &tick_grid(settings), settings.discard)?)
}

/// Reference logarithmic law `(1/2pi) ln n` against which the cross-over
/// time is defined.
pub fn crossover_log_law(n: f64) -> f64 {
    n.ln() / (2.0 * PI)
}

/// Tick number at which `J^2 Var[T_n]` first exceeds twice the reference
/// log law, i.e. where the excess over the log law equals the log law
/// itself (the defining balance of the cross-over time). Interpolated in
/// `ln n` between grid points; `None` if the curve never crosses.
pub fn departure_tick(rows: &[WaitingRow], current: f64) -> Option<f64> {
    let excess: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= DEPARTURE_SEARCH_START)
        .map(|r| {
            let n = r.n as f64;
            (n.ln(), current * current * r.estimate.variance - 2.0 * crossover_log_law(n))
        })
        .collect();
    let first = excess.iter().position(|(_, e)| *e >= 0.0)?;
    if first == 0 {
        return Some(excess[0].0.exp());
    }
    let ((x0, e0), (x1, e1)) = (excess[first - 1], excess[first]);
    Some((x0 + (x1 - x0) * (-e0) / (e1 - e0)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use trajectories::PooledEstimate;

    fn row(n: usize, variance: f64) -> WaitingRow {
        WaitingRow {
            n,
            estimate: PooledEstimate { mean: 0.0, variance, mean_stderr: None, variance_stderr: None, samples: 10 },
        }
    }

    #[test]
    fn departure_interpolates_in_log_n() {
        let j = 0.5;
        let scaled = |n: f64, k: f64| k * 2.0 * crossover_log_law(n) / (j * j);
        let rows = vec![row(5, 100.0), row(10, scaled(10.0, 0.5)), row(100, scaled(100.0, 0.75)), row(1000, scaled(1000.0, 1.25))];
        let n = departure_tick(&rows, j).unwrap();
        assert!(n > 100.0 && n < 1000.0, "{n}");
        assert!(departure_tick(&rows[..3], j).is_none());
        assert_eq!(departure_tick(&[row(20, 1e6)], j), Some(20.0f64.ln().exp()));
    }

    #[test]
    fn grid_leaves_two_blocks() {
        let settings = MonteCarloSettings { ticks: 2200, discard: 200, ..MonteCarloSettings::default() };
        let grid = tick_grid(&settings);
        assert_eq!(grid[0], 1);
        assert!(2 * grid.last().unwrap() <= 1999);
    }
}
