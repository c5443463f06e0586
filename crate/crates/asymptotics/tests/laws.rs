use std::f64::consts::PI;

use asymptotics::special::{bessel_j0, bessel_j1, lambert_w_minus1};
use asymptotics::{
    bulk_correlator, bulk_variance_asymptotic, bulk_variance_closed_form, crossover_time, disorder_crossover,
    localization_length, sine_kernel_number_variance, thermal_crossover, AsymptoticsError,
};
use chain_core::quad::{composite_gauss, gauss_legendre};
use proptest::prelude::*;

#[test]
fn closed_form_approaches_the_log_law() {
    let g = 0.6;
    let gap = |gt: f64| (bulk_variance_closed_form(g, gt / g) - bulk_variance_asymptotic(g, gt / g)).abs();
    assert!(gap(1e3) < 1e-3);
    assert!(gap(1e4) < gap(1e2));
}

#[test]
fn correlator_integrates_to_the_variance() {
    let (g, t) = (0.9, 7.0);
    let reduced = 2.0 * composite_gauss(|tau| (t - tau) * bulk_correlator(g, tau), 0.0, t, 40, 16);
    assert!((reduced - bulk_variance_closed_form(g, t)).abs() < 1e-10);
}

#[test]
fn sine_kernel_variance_matches_the_discretized_kernel() {
    // Number variance of a determinantal process in a window: tr K - tr K^2.
    let x = 6.0;
    let (nodes, weights) = gauss_legendre(60);
    let points: Vec<f64> = nodes.iter().map(|u| 0.5 * x * (u + 1.0)).collect();
    let weights: Vec<f64> = weights.iter().map(|w| 0.5 * x * w).collect();
    let sinc = |d: f64| if d == 0.0 { 1.0 } else { (PI * d).sin() / (PI * d) };
    let trace_squared: f64 = (0..60)
        .flat_map(|i| (0..60).map(move |j| (i, j)))
        .map(|(i, j)| weights[i] * weights[j] * sinc(points[i] - points[j]).powi(2))
        .sum();
    let variance = x - trace_squared;
    assert!((variance / sine_kernel_number_variance(x) - 1.0).abs() < 0.02);
}

#[test]
fn crossover_grows_as_diffusion_falls() {
    let current = 0.3;
    let times: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|d| crossover_time(current, *d).unwrap().lambert).collect();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    let (diffusion, c) = (1e-4, crossover_time(current, 1e-4).unwrap());
    let t = c.lambert;
    assert!(((current * t).ln() / (2.0 * PI) - diffusion * t).abs() < 1e-9 * diffusion * t);
    assert!(c.leading > t);
    assert!(matches!(crossover_time(current, 1.0), Err(AsymptoticsError::NoCrossing { .. })));
}

#[test]
fn thermal_and_disorder_scalings() {
    let t = thermal_crossover(0.2, 5.0).unwrap();
    assert!((t - 5.0 * 5f64.exp() / 0.2).abs() < 1e-9);
    assert!(thermal_crossover(0.2, 0.5).is_err());
    let weak = disorder_crossover(0.2, 1e-4, 0.01, 0.1).unwrap();
    assert!(weak.regime_holds);
    assert!((weak.time - 1.0 / (0.01 * 0.2)).abs() < 1e-9);
    assert!(!disorder_crossover(0.2, 1e-4, 0.09, 0.1).unwrap().regime_holds);
    assert!(localization_length(1.5, 0.1, 0.5).is_err());
}

proptest! {
    #[test]
    fn bessel_wronskian_like_identity(x in 0.1f64..60.0) {
        // J0' = -J1 checked by a centred difference.
        let h = 1e-5;
        let derivative = (bessel_j0(x + h) - bessel_j0(x - h)) / (2.0 * h);
        prop_assert!((derivative + bessel_j1(x)).abs() < 1e-8);
    }

    #[test]
    fn lower_lambert_branch_inverts(z in -0.3678f64..-1e-6) {
        let w = lambert_w_minus1(z).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!((w * w.exp() - z).abs() < 1e-12 * z.abs().max(1e-3));
    }

    #[test]
    fn localization_length_is_even_in_energy(e in 0.0f64..0.99, w in 0.01f64..1.0) {
        let right = localization_length(e, w, 0.5).unwrap();
        let left = localization_length(-e, w, 0.5).unwrap();
        prop_assert_eq!(right, left);
        prop_assert!(right > 0.0);
    }
}
