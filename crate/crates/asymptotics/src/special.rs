//! Bessel functions of the first kind (orders 0 and 1), sine and cosine
//! integrals, and the lower real branch of the Lambert W function.

use std::f64::consts::{FRAC_PI_2, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 8.0;
const HANKEL_LIMIT: f64 = 30.0;

/// `J_0(x)`.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        bessel_series(0, ax)
    } else if ax < HANKEL_LIMIT {
        miller(ax).0
    } else {
        hankel(0, ax)
    }
}

/// `J_1(x)`, odd in `x`.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        bessel_series(1, ax)
    } else if ax < HANKEL_LIMIT {
        miller(ax).1
    } else {
        hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn bessel_series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Backward recurrence normalized by `J_0 + 2 sum J_2k = 1`.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((1.5 * x + 40.0) as usize / 2);
    let (mut above, mut current) = (0.0f64, 1e-300f64);
    let (mut j0, mut j1) = (0.0, 0.0);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > 1e250 {
            above *= 1e-250;
            current *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
        // `current` now holds J_{k-1}.
        let index = k - 1;
        if index == 1 {
            j1 = current;
        }
        if index == 0 {
            j0 = current;
        } else if index % 2 == 0 {
            norm += 2.0 * current;
        }
    }
    norm += j0;
    (j0 / norm, j1 / norm)
}

/// Large-argument expansion, truncated at its smallest term.
fn hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    let (mut p, mut q) = (0.0, 0.0);
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

const SICI_LIMIT: f64 = 4.0;

/// `(Si(x), Ci(x) - ln x - gamma)` for `x > 0`; the second component stays
/// accurate as `x -> 0`.
pub fn sici_regular(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "sine/cosine integrals need x > 0, got {x}");
    if x <= SICI_LIMIT {
        let q = -x * x;
        let (mut si_term, mut ci_term) = (x, 1.0);
        let (mut si, mut ci) = (x, 0.0);
        for k in 1..100 {
            let kf = k as f64;
            si_term *= q / ((2.0 * kf) * (2.0 * kf + 1.0));
            ci_term *= q / ((2.0 * kf - 1.0) * (2.0 * kf));
            let si_k = si_term / (2.0 * kf + 1.0);
            let ci_k = ci_term / (2.0 * kf);
            si += si_k;
            ci += ci_k;
            if si_k.abs() < 1e-17 * si.abs() && ci_k.abs() < 1e-17 * ci.abs().max(1e-300) {
                break;
            }
        }
        (si, ci)
    } else {
        let (re, im) = e1_imaginary(x);
        (FRAC_PI_2 + im, -re - x.ln() - EULER_GAMMA)
    }
}

/// `E_1(ix)` by the continued fraction, evaluated with the modified Lentz method.
fn e1_imaginary(x: f64) -> (f64, f64) {
    type C = (f64, f64);
    let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let inv = |a: C| {
        let d = a.0 * a.0 + a.1 * a.1;
        (a.0 / d, -a.1 / d)
    };
    let tiny = 1e-300;
    let mut b: C = (1.0, x);
    let mut c: C = (1.0 / tiny, 0.0);
    let mut d = inv(b);
    let mut h = d;
    for i in 1..100_000 {
        let a = -((i * i) as f64);
        b.0 += 2.0;
        d = inv((a * d.0 + b.0, a * d.1 + b.1));
        let ac = mul((a, 0.0), inv(c));
        c = (b.0 + ac.0, b.1 + ac.1);
        let del = mul(c, d);
        h = mul(h, del);
        if (del.0 - 1.0).abs() + del.1.abs() < 1e-16 {
            break;
        }
    }
    mul(h, (x.cos(), -x.sin()))
}

/// Sine integral `Si(x)`, odd in `x`.
pub fn si(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        sici_regular(x.abs()).0.copysign(x)
    }
}

/// Cosine integral `Ci(x)` for `x > 0`.
pub fn ci(x: f64) -> f64 {
    sici_regular(x).1 + x.ln() + EULER_GAMMA
}

/// `Ci(x) - ln x - gamma`, which tends to zero with `x`.
pub fn ci_minus_log(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        sici_regular(x).1
    }
}

/// Lower real branch `W_-1(z)` for `z` in `[-1/e, 0)`, by Halley iteration.
pub fn lambert_w_minus1(z: f64) -> Option<f64> {
    let branch = -(-1.0f64).exp();
    if !(branch..0.0).contains(&z) {
        return None;
    }
    let p2 = 2.0 * (1.0 + std::f64::consts::E * z);
    if p2 <= 1e-30 {
        return Some(-1.0);
    }
    let mut w = if z < -0.25 {
        let p = -p2.sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        let done = step.abs() <= 1e-15 * w.abs();
        w = next.min(-1.0);
        if done {
            break;
        }
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chain_core::quad::{adaptive, Tolerance};

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    fn tol() -> Tolerance {
        Tolerance { abs: 1e-16, rel: 1e-15, max_panels: 100_000 }
    }

    fn bessel_oracle(order: f64, x: f64) -> f64 {
        let panels = (x as usize).max(4);
        adaptive(|th: f64| (order * th - x * th.sin()).cos(), 0.0, PI, panels, tol()).value / PI
    }

    /// Relative error measured against the larger of the value and the
    /// oscillation envelope, since relative error is undefined at zeros.
    fn scaled_error(value: f64, exact: f64, envelope: f64) -> f64 {
        (value - exact).abs() / exact.abs().max(envelope)
    }

    #[test]
    fn bessel_matches_integral_representation() {
        let mut grid = log_grid(1e-3, 1e3, 241);
        grid.extend([7.999, 8.0, 8.001, 29.99, 30.0, 30.01]);
        for &x in &grid {
            let envelope = (2.0 / (PI * x)).sqrt().min(1.0);
            let e0 = scaled_error(bessel_j0(x), bessel_oracle(0.0, x), envelope);
            let e1 = scaled_error(bessel_j1(x), bessel_oracle(1.0, x), envelope.min(x));
            assert!(e0 < 1e-10, "J0({x}) error {e0:e}");
            assert!(e1 < 1e-10, "J1({x}) error {e1:e}");
        }
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j1(-2.0) + bessel_j1(2.0)).abs() < 1e-16);
    }

    #[test]
    fn sine_cosine_integrals_match_quadrature() {
        let mut grid = log_grid(1e-3, 1e3, 241);
        grid.extend([3.999, 4.0, 4.001]);
        for &x in &grid {
            let panels = (x as usize).max(2);
            let si_exact = adaptive(|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, panels, tol()).value;
            let reg_exact = adaptive(
                |t: f64| if t < 1e-4 { -t / 2.0 + t * t * t / 24.0 } else { (t.cos() - 1.0) / t },
                0.0,
                x,
                panels,
                tol(),
            )
            .value;
            let ci_exact = reg_exact + x.ln() + EULER_GAMMA;
            let e_si = scaled_error(si(x), si_exact, 0.0);
            let e_ci = scaled_error(ci(x), ci_exact, (1.0 / x).min(1.0));
            assert!(e_si < 1e-10, "Si({x}) error {e_si:e}");
            assert!(e_ci < 1e-10, "Ci({x}) error {e_ci:e}");
            let e_reg = scaled_error(ci_minus_log(x), reg_exact, 1e-300);
            assert!(e_reg < 1e-10, "Ci-log({x}) error {e_reg:e}");
        }
    }

    #[test]
    fn cosine_integral_small_argument_identity() {
        assert!(ci_minus_log(1e-4).abs() < 1e-8);
        assert!((ci_minus_log(1e-4) + 0.25e-8).abs() < 1e-17);
    }

    #[test]
    fn lambert_lower_branch() {
        assert_eq!(lambert_w_minus1(-(-1.0f64).exp()), Some(-1.0));
        assert_eq!(lambert_w_minus1(0.1), None);
        assert_eq!(lambert_w_minus1(-0.5), None);
        for z in log_grid(1e-300, 0.3678, 200).into_iter().map(|v| -v) {
            let w = lambert_w_minus1(z).unwrap();
            assert!(w <= -1.0);
            assert!((w * w.exp() - z).abs() <= 1e-12 * z.abs(), "z={z} w={w}");
        }
    }
}
