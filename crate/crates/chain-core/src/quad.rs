//! One-dimensional quadrature: Gauss–Legendre rules and a globally adaptive
//! 7/15-point Gauss–Kronrod integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    Estimate { value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Tolerances and panel budget for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, rel: 1e-12, max_panels: 20_000 }
    }
}

/// Globally adaptive Gauss–Kronrod on `[a, b]`, starting from `initial`
/// equal panels and always bisecting the panel with the largest error.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, initial: usize, tol: Tolerance) -> Estimate {
    let initial = initial.max(1);
    let width = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(2 * initial);
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for i in 0..initial {
        let lo = a + width * i as f64;
        let hi = if i + 1 == initial { b } else { lo + width };
        let est = kronrod_panel(&f, lo, hi);
        total.value += est.value;
        total.error += est.error;
        heap.push(Panel { a: lo, b: hi, est });
    }
    while total.error > tol.abs.max(tol.rel * total.value.abs()) && heap.len() < tol.max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = kronrod_panel(&f, worst.a, mid);
        let right = kronrod_panel(&f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
    }
    // Re-sum to shed the rounding drift of the running totals.
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
    Estimate { value, error }
}

/// Integral over the whole real line of a function decaying at least like
/// `1/x^2`. The core `[-cut, cut]` is integrated directly and each tail via
/// `x = cut/u`, which maps it onto `(0, 1]` with a bounded integrand.
pub fn real_line<F: Fn(f64) -> f64>(f: F, cut: f64, initial: usize, tol: Tolerance) -> Estimate {
    let core = adaptive(&f, -cut, cut, initial, tol);
    let tail = |sign: f64| {
        adaptive(
            |u: f64| {
                if u <= 0.0 {
                    0.0
                } else {
                    let x = sign * cut / u;
                    f(x) * cut / (u * u)
                }
            },
            0.0,
            1.0,
            4,
            tol,
        )
    };
    let (l, r) = (tail(-1.0), tail(1.0));
    Estimate { value: core.value + l.value + r.value, error: core.error + l.error + r.error }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre over `panels` equal panels of `[a, b]`.
pub fn composite_gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let centre = a + h * (p as f64 + 0.5);
            x.iter().zip(&w).map(|(xi, wi)| wi * f(centre + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let est = kronrod_panel(&|x: f64| x.powi(20) + 3.0 * x.powi(7), -1.0, 1.0);
        assert!((est.value - 2.0 / 21.0).abs() < 1e-15);
        let gauss_exact = kronrod_panel(&|x: f64| x.powi(12), 0.0, 1.0);
        assert!(gauss_exact.error < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let eps: f64 = 1e-4;
        let f = |x: f64| eps / (x * x + eps * eps);
        let est = adaptive(f, -1.0, 1.0, 1, Tolerance::default());
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((est.value - exact).abs() < 1e-10, "{} vs {}", est.value, exact);
    }

    #[test]
    fn real_line_lorentzian() {
        let est = real_line(|x| 1.0 / (1.0 + x * x), 5.0, 8, Tolerance::default());
        assert!((est.value - std::f64::consts::PI).abs() < 1e-12);
        let est = real_line(|x| 1.0 / (1.0 + x * x).powi(2), 5.0, 8, Tolerance::default());
        assert!((est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn legendre_rules() {
        for n in [1, 2, 5, 16, 41] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 2;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((integral - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
        let v = composite_gauss(f64::sin, 0.0, std::f64::consts::PI, 10, 8);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
