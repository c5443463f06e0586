use chain_core::{sample_stream, ChainSpec, CMat, Complex64, EffectiveHamiltonian, Occupations};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::slater::{Slater, WaitingTimeSampler};
use crate::state::{apply_jump, check_cheap, jump_rates, reproject, RiccatiFlow};
use crate::{CovarianceState, JumpKind, TrajectoryError};

/// Largest jump probability allowed in one fixed step.
pub const MAX_STEP_PROBABILITY: f64 = 0.1;
pub const DEFAULT_REPROJECT_EVERY: usize = 50;

/// How the conditional state is advanced between jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Integrator {
    /// Fourth-order Runge–Kutta steps of the no-jump flow with one Bernoulli
    /// draw per step, re-projecting onto a pure state every `reproject_every` steps.
    FixedStep { dt: f64, reproject_every: usize },
    /// Jump times drawn exactly from the no-jump survival probability of the
    /// orbital representation; no time step.
    WaitingTime,
}

impl Integrator {
    /// Fixed stepping with `dt = 0.01 / max(rate, 2 max g)`.
    pub fn default_fixed(spec: &ChainSpec) -> Self {
        let rates = spec.rates();
        let dt = 0.01 / rates.left.max(rates.right).max(2.0 * spec.max_coupling());
        Self::FixedStep { dt, reproject_every: DEFAULT_REPROJECT_EVERY }
    }
}

/// Stop after `ticks` ticks or at `t_max`, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub ticks: Option<usize>,
    pub t_max: f64,
}

impl Stop {
    pub fn ticks(n: usize) -> Self {
        Self { ticks: Some(n), t_max: f64::INFINITY }
    }

    pub fn time(t_max: f64) -> Self {
        Self { ticks: None, t_max }
    }

    fn done(&self, ticks: usize, t: f64) -> bool {
        self.ticks.is_some_and(|n| ticks >= n) || t >= self.t_max
    }
}

/// Right-lead activity of one trajectory started from the vacuum.
///
/// The clock ticks whenever the net count (emissions minus absorptions at
/// the right lead) first reaches a new level; at full bias every emission
/// is a tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick_times: Vec<f64>,
    pub emission_times: Vec<f64>,
    pub absorption_times: Vec<f64>,
    /// Jump counts in the order `LeftIn, LeftOut, RightIn, RightOut`.
    pub aux_jumps: [u64; 4],
    pub seed: u64,
    pub stream: u64,
    pub integrator: Integrator,
    pub t_end: f64,
}

impl TickRecord {
    fn new(seed: u64, stream: u64, integrator: Integrator) -> Self {
        Self {
            tick_times: Vec::new(),
            emission_times: Vec::new(),
            absorption_times: Vec::new(),
            aux_jumps: [0; 4],
            seed,
            stream,
            integrator,
            t_end: 0.0,
        }
    }

    fn push(&mut self, kind: JumpKind, t: f64) {
        self.aux_jumps[kind.index()] += 1;
        match kind {
            JumpKind::RightOut => {
                self.emission_times.push(t);
                let net = self.emission_times.len() as i64 - self.absorption_times.len() as i64;
                if net > self.tick_times.len() as i64 {
                    self.tick_times.push(t);
                }
            }
            JumpKind::RightIn => self.absorption_times.push(t),
            _ => {}
        }
    }

    /// Net right-lead count in `[from, to)`.
    pub fn net_count(&self, from: f64, to: f64) -> i64 {
        let within = |times: &[f64]| (times.partition_point(|&t| t < to) - times.partition_point(|&t| t < from)) as i64;
        within(&self.emission_times) - within(&self.absorption_times)
    }
}

fn pick_channel(rates: &[f64; 4], threshold: f64) -> JumpKind {
    let mut cumulative = 0.0;
    for (kind, rate) in JumpKind::ALL.into_iter().zip(rates) {
        cumulative += rate;
        if threshold < cumulative {
            return kind;
        }
    }
    JumpKind::ALL.into_iter().zip(rates).rev().find(|(_, r)| **r > 0.0).map_or(JumpKind::RightOut, |(k, _)| k)
}

/// Simulates one trajectory with RNG stream `stream` of `seed`.
pub fn simulate_trajectory(
    hamiltonian: &EffectiveHamiltonian,
    occupations: Occupations,
    stop: Stop,
    integrator: Integrator,
    seed: u64,
    stream: u64,
) -> Result<TickRecord, TrajectoryError> {
    if stop.ticks.is_none() && !stop.t_max.is_finite() {
        return Err(TrajectoryError::Domain("a trajectory needs a tick count or a finite end time".into()));
    }
    let mut rng = sample_stream(seed, stream);
    let mut record = TickRecord::new(seed, stream, integrator);
    match integrator {
        Integrator::FixedStep { dt, reproject_every } => {
            if !(dt > 0.0 && dt.is_finite()) || reproject_every == 0 {
                return Err(TrajectoryError::Domain("fixed stepping needs dt > 0 and a positive re-projection cadence".into()));
            }
            let flow = RiccatiFlow::new(hamiltonian, occupations);
            let mut state = CovarianceState::vacuum(hamiltonian.dim());
            let mut steps: u64 = 0;
            while !stop.done(record.tick_times.len(), steps as f64 * dt) {
                let rates = jump_rates(&state, hamiltonian, occupations)?;
                let probability = rates.iter().sum::<f64>() * dt;
                if probability > MAX_STEP_PROBABILITY {
                    return Err(TrajectoryError::StepTooLarge(probability));
                }
                let draw: f64 = rng.random();
                steps += 1;
                if draw < probability {
                    let kind = pick_channel(&rates, draw / dt);
                    state = apply_jump(&state, kind)?;
                    record.push(kind, steps as f64 * dt);
                } else {
                    state.matrix = flow.step(&state.matrix, dt);
                    check_cheap(&state)?;
                }
                if steps % reproject_every as u64 == 0 {
                    state = reproject(&state)?;
                }
            }
            record.t_end = steps as f64 * dt;
        }
        Integrator::WaitingTime => {
            let sampler = WaitingTimeSampler::new(hamiltonian, occupations)?;
            let mut state = Slater::vacuum(hamiltonian.dim());
            let mut t = 0.0;
            while !stop.done(record.tick_times.len(), t) {
                let Some((wait, before)) = sampler.next_jump(&state, stop.t_max - t, &mut rng) else {
                    t = stop.t_max;
                    break;
                };
                t += wait;
                let rates = before.rates(hamiltonian, occupations);
                let total: f64 = rates.iter().sum();
                let draw: f64 = rng.random();
                state = before;
                if total <= 0.0 {
                    continue;
                }
                let kind = pick_channel(&rates, draw * total);
                state = state.jump(kind)?;
                record.push(kind, t);
            }
            record.t_end = t;
        }
    }
    Ok(record)
}

/// Independent trajectories on streams `0..n_trajectories`, in stream order.
pub fn simulate_ensemble(
    hamiltonian: &EffectiveHamiltonian,
    occupations: Occupations,
    stop: Stop,
    integrator: Integrator,
    seed: u64,
    n_trajectories: usize,
) -> Result<Vec<TickRecord>, TrajectoryError> {
    (0..n_trajectories as u64)
        .into_par_iter()
        .map(|stream| simulate_trajectory(hamiltonian, occupations, stop, integrator, seed, stream))
        .collect()
}

/// Trajectory-averaged covariance at each of `times` (increasing), starting
/// from the vacuum; uses exact jump-time sampling.
pub fn ensemble_covariance(
    hamiltonian: &EffectiveHamiltonian,
    occupations: Occupations,
    times: &[f64],
    seed: u64,
    n_trajectories: usize,
) -> Result<Vec<CMat>, TrajectoryError> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(TrajectoryError::Domain("snapshot times must be non-negative and increasing".into()));
    }
    let sampler = WaitingTimeSampler::new(hamiltonian, occupations)?;
    let n = hamiltonian.dim();
    let per_trajectory: Vec<Vec<CMat>> = (0..n_trajectories as u64)
        .into_par_iter()
        .map(|stream| -> Result<Vec<CMat>, TrajectoryError> {
            let mut rng = sample_stream(seed, stream);
            let mut snapshots = Vec::with_capacity(times.len());
            let mut state = Slater::vacuum(n);
            let mut t = 0.0;
            let end = times.last().copied().unwrap_or(0.0);
            while snapshots.len() < times.len() {
                let jump = sampler.next_jump(&state, end - t, &mut rng);
                let reach = jump.as_ref().map_or(f64::INFINITY, |(wait, _)| t + wait);
                while let Some(&s) = times.get(snapshots.len()).filter(|s| **s < reach) {
                    snapshots.push(sampler.evolve(&state, s - t).0.covariance().matrix);
                }
                let Some((wait, before)) = jump else { break };
                t += wait;
                let rates = before.rates(hamiltonian, occupations);
                let total: f64 = rates.iter().sum();
                let draw: f64 = rng.random();
                state = if total > 0.0 { before.jump(pick_channel(&rates, draw * total))? } else { before };
            }
            Ok(snapshots)
        })
        .collect::<Result<_, _>>()?;
    let scale = Complex64::new(1.0 / n_trajectories as f64, 0.0);
    Ok((0..times.len())
        .map(|k| per_trajectory.iter().fold(CMat::zeros(n, n), |acc, snaps| acc + &snaps[k]) * scale)
        .collect())
}

/// [`simulate_trajectory`] for a clean chain.
pub fn simulate_spec(spec: &ChainSpec, stop: Stop, integrator: Integrator, seed: u64, stream: u64) -> Result<TickRecord, TrajectoryError> {
    simulate_trajectory(&EffectiveHamiltonian::clean(spec), spec.occupations(), stop, integrator, seed, stream)
}
