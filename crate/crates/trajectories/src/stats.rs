use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{TickRecord, TrajectoryError};

pub const DEFAULT_DISCARD: usize = 200;
pub const HISTOGRAM_BINS: usize = 60;
/// Histogram range in units of the mean waiting time.
pub const HISTOGRAM_RANGE: f64 = 5.0;

/// Running sums of one group of samples.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    sum: f64,
    squares: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        self.sum += x;
        self.squares += x * x;
    }

    fn minus(self, other: Moments) -> Moments {
        Moments { count: self.count - other.count, sum: self.sum - other.sum, squares: self.squares - other.squares }
    }

    fn plus(self, other: Moments) -> Moments {
        Moments { count: self.count + other.count, sum: self.sum + other.sum, squares: self.squares + other.squares }
    }

    fn mean(&self) -> f64 {
        self.sum / self.count
    }

    fn variance(&self) -> f64 {
        let mean = self.mean();
        ((self.squares - self.count * mean * mean) / (self.count - 1.0)).max(0.0)
    }
}

/// Pooled mean and variance with leave-one-group-out jackknife errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PooledEstimate {
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: Option<f64>,
    pub variance_stderr: Option<f64>,
    pub samples: usize,
}

fn pooled(groups: &[Moments]) -> PooledEstimate {
    let total = groups.iter().fold(Moments::default(), |a, g| a.plus(*g));
    let populated: Vec<&Moments> = groups.iter().filter(|g| g.count > 0.0).collect();
    let jackknife = |stat: &dyn Fn(&Moments) -> f64| -> Option<f64> {
        let k = populated.len();
        if k < 2 {
            return None;
        }
        let leave_out: Vec<f64> = populated.iter().map(|g| stat(&total.minus(**g))).collect();
        let centre = leave_out.iter().sum::<f64>() / k as f64;
        let spread: f64 = leave_out.iter().map(|v| (v - centre).powi(2)).sum();
        Some(((k as f64 - 1.0) / k as f64 * spread).sqrt())
    };
    PooledEstimate {
        mean: total.mean(),
        variance: total.variance(),
        mean_stderr: jackknife(&|m| m.mean()),
        variance_stderr: jackknife(&|m| m.variance()),
        samples: total.count as usize,
    }
}

/// Statistics of the time `T_n` spanned by `n` consecutive ticks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaitingRow {
    pub n: usize,
    #[serde(flatten)]
    pub estimate: PooledEstimate,
}

/// Stationary estimates of `E[T_n]` and `Var[T_n]`: after dropping
/// `discard_first` ticks, each record contributes non-overlapping windows
/// `t_{k+n} - t_k`; errors come from a jackknife over records.
pub fn waiting_time_stats(records: &[TickRecord], n_values: &[usize], discard_first: usize) -> Result<Vec<WaitingRow>, TrajectoryError> {
    if records.is_empty() || n_values.is_empty() {
        return Err(TrajectoryError::Empty);
    }
    let needed = discard_first + n_values.iter().copied().max().unwrap_or(0) + 1;
    if let Some(short) = records.iter().find(|r| r.tick_times.len() < needed) {
        return Err(TrajectoryError::InsufficientTicks { needed, found: short.tick_times.len() });
    }
    n_values
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(TrajectoryError::Domain("T_n needs n >= 1".into()));
            }
            let groups: Vec<Moments> = records
                .iter()
                .map(|r| {
                    let ticks = &r.tick_times[discard_first..];
                    let mut m = Moments::default();
                    for k in (0..ticks.len() - n).step_by(n) {
                        m.push(ticks[k + n] - ticks[k]);
                    }
                    m
                })
                .collect();
            Ok(WaitingRow { n, estimate: pooled(&groups) })
        })
        .collect()
}

/// Statistics of the number of ticks in a window of length `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingRow {
    pub time: f64,
    #[serde(flatten)]
    pub estimate: PooledEstimate,
}

/// Net counts in non-overlapping windows `[start + k t, start + (k+1) t)` that
/// end before each record's `t_end`.
pub fn counting_statistics(records: &[TickRecord], times: &[f64], start: f64) -> Result<Vec<CountingRow>, TrajectoryError> {
    if records.is_empty() || times.is_empty() {
        return Err(TrajectoryError::Empty);
    }
    times
        .iter()
        .map(|&window| {
            if !(window > 0.0) {
                return Err(TrajectoryError::Domain(format!("window length must be positive, got {window}")));
            }
            let groups: Vec<Moments> = records
                .iter()
                .map(|r| {
                    let mut m = Moments::default();
                    let mut lo = start;
                    while lo + window <= r.t_end {
                        m.push(r.net_count(lo, lo + window) as f64);
                        lo += window;
                    }
                    m
                })
                .collect();
            if groups.iter().all(|g| g.count < 2.0) && groups.iter().map(|g| g.count).sum::<f64>() < 2.0 {
                return Err(TrajectoryError::InsufficientTicks { needed: 2, found: 0 });
            }
            Ok(CountingRow { time: window, estimate: pooled(&groups) })
        })
        .collect()
}

/// Fixed-width histogram of waiting times, normalized as a density over all samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub mean: f64,
    pub mean_stderr: Option<f64>,
    pub samples: usize,
}

impl Histogram {
    fn build(groups: &[Vec<f64>], upper: f64) -> Result<Self, TrajectoryError> {
        let moments: Vec<Moments> = groups
            .iter()
            .map(|g| g.iter().fold(Moments::default(), |mut m, &x| {
                m.push(x);
                m
            }))
            .collect();
        let estimate = pooled(&moments);
        if estimate.samples == 0 {
            return Err(TrajectoryError::Empty);
        }
        let width = upper / HISTOGRAM_BINS as f64;
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        for &x in groups.iter().flatten() {
            let bin = (x / width) as usize;
            if bin < HISTOGRAM_BINS {
                counts[bin] += 1;
            }
        }
        let norm = estimate.samples as f64 * width;
        Ok(Self {
            edges: (0..=HISTOGRAM_BINS).map(|k| k as f64 * width).collect(),
            density: counts.iter().map(|&c| c as f64 / norm).collect(),
            counts,
            mean: estimate.mean,
            mean_stderr: estimate.mean_stderr,
            samples: estimate.samples,
        })
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }
}

/// Waiting-time histograms: all waits, waits after a faster-than-average
/// wait, and waits after a slower one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitingHistograms {
    pub all: Histogram,
    pub after_fast: Histogram,
    pub after_slow: Histogram,
}

pub fn conditional_waiting_histogram(records: &[TickRecord], discard_first: usize) -> Result<WaitingHistograms, TrajectoryError> {
    let waits: Vec<Vec<f64>> = records
        .iter()
        .map(|r| r.tick_times.get(discard_first..).unwrap_or(&[]).windows(2).map(|w| w[1] - w[0]).collect())
        .collect();
    let total: usize = waits.iter().map(Vec::len).sum();
    if total < 2 {
        return Err(TrajectoryError::Empty);
    }
    let mean = waits.iter().flatten().sum::<f64>() / total as f64;
    let upper = HISTOGRAM_RANGE * mean;
    let split = |fast: bool| -> Vec<Vec<f64>> {
        waits
            .iter()
            .map(|w| w.windows(2).filter(|p| (p[0] < mean) == fast).map(|p| p[1]).collect())
            .collect()
    };
    Ok(WaitingHistograms {
        all: Histogram::build(&waits, upper)?,
        after_fast: Histogram::build(&split(true), upper)?,
        after_slow: Histogram::build(&split(false), upper)?,
    })
}

/// Reference waiting-time laws in units of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surmise {
    /// `(32/pi^2) s^2 exp(-4 s^2/pi)`.
    WignerDyson,
    /// `exp(-s)`.
    Exponential,
}

impl Surmise {
    pub fn density(self, s: f64) -> f64 {
        match self {
            Surmise::WignerDyson => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
            Surmise::Exponential => (-s).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurmiseFit {
    /// Fitted mean in units of the sample mean.
    pub scale: f64,
    /// Squared L2 distance between histogram and fitted density, in units of the mean.
    pub goodness: f64,
}

fn misfit(hist: &Histogram, surmise: Surmise, scale: f64) -> f64 {
    let (nodes, weights) = chain_core::quad::gauss_legendre(5);
    let unit = hist.mean * scale;
    let width = hist.width();
    hist.density
        .iter()
        .zip(hist.edges.iter())
        .map(|(&observed, &left)| {
            let model: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| 0.5 * w * surmise.density((left + 0.5 * width * (x + 1.0)) / unit) / unit)
                .sum();
            (observed - model).powi(2) * hist.mean * width
        })
        .sum()
}

/// Least-squares fit of a surmise with a free scale.
pub fn fit_surmise(hist: &Histogram, surmise: Surmise) -> SurmiseFit {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let f = |log_scale: f64| misfit(hist, surmise, log_scale.exp());
    let (mut a, mut b) = ((0.2f64).ln(), 5f64.ln());
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-9 {
        if fc < fd {
            (b, d, fd) = (d, c, fc);
            c = b - golden * (b - a);
            fc = f(c);
        } else {
            (a, c, fc) = (c, d, fd);
            d = a + golden * (b - a);
            fd = f(d);
        }
    }
    let scale = (0.5 * (a + b)).exp();
    SurmiseFit { scale, goodness: misfit(hist, surmise, scale) }
}

pub fn wigner_dyson_fit(hist: &Histogram) -> SurmiseFit {
    fit_surmise(hist, Surmise::WignerDyson)
}
