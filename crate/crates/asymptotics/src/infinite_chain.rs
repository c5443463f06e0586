use std::f64::consts::PI;

use crate::special::{bessel_j0, bessel_j1, ci_minus_log, si, EULER_GAMMA};
use crate::AsymptoticsError;

/// Current of the infinite uniform chain at full bias, `2g/pi`.
pub fn mean_current_infinite(g: f64) -> f64 {
    2.0 * g / PI
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Connected two-time correlator of the bond current deep in the bulk.
pub fn bulk_correlator(g: f64, tau: f64) -> f64 {
    let x = 2.0 * g * tau;
    let (j0, j1) = (bessel_j0(x), bessel_j1(x));
    0.5 * g * g * (j0 * j0 - j1 * j1) - 2.0 * g * g / (PI * PI) * sinc(x).powi(2)
}

/// Exact variance of the charge transferred across a bulk bond in time `t`.
pub fn bulk_variance_closed_form(g: f64, t: f64) -> f64 {
    let a = 2.0 * g * t;
    if a == 0.0 {
        return 0.0;
    }
    let (j0, j1) = (bessel_j0(a), bessel_j1(a));
    let bessel = 0.25 * a * a * (j0 * j0 + j1 * j1) - 0.25 * a * j1 * j0;
    let integrals = a.sin().powi(2) - a * si(2.0 * a) - 0.5 * ci_minus_log(2.0 * a);
    bessel + integrals / (PI * PI)
}

/// Leading logarithmic growth of [`bulk_variance_closed_form`].
pub fn bulk_variance_asymptotic(g: f64, t: f64) -> f64 {
    ((4.0 * g * t).ln() + EULER_GAMMA + 1.0) / (2.0 * PI * PI)
}

/// Number variance of the sine-kernel process in a window holding `x` points
/// on average.
pub fn sine_kernel_number_variance(x: f64) -> f64 {
    ((2.0 * PI * x).ln() + EULER_GAMMA + 1.0) / (PI * PI)
}

/// Perturbative localization length at energy `e` for on-site disorder of width `w`.
pub fn localization_length(e: f64, w: f64, g: f64) -> Result<f64, AsymptoticsError> {
    if !(w > 0.0) {
        return Err(AsymptoticsError::Domain(format!("disorder width must be positive, got {w}")));
    }
    if e.abs() > 2.0 * g {
        return Err(AsymptoticsError::Domain(format!("energy {e} lies outside the band [-{0}, {0}]", 2.0 * g)));
    }
    Ok((96.0 * g * g - 24.0 * e * e) / (w * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chain_core::quad::{adaptive, composite_gauss, Tolerance};

    #[test]
    fn current_and_correlator_limits() {
        assert!((mean_current_infinite(1.0) - 0.636_619_772_367_581_3).abs() < 1e-15);
        assert_eq!(mean_current_infinite(0.0), 0.0);
        let g = 0.7;
        assert!((bulk_correlator(g, 0.0) - (g * g / 2.0 - 2.0 * g * g / (PI * PI))).abs() < 1e-15);
    }

    /// Momentum-space form of the correlator: three half-period Fourier
    /// integrals of the band dispersion.
    fn momentum_correlator(g: f64, tau: f64) -> f64 {
        let tol = Tolerance { abs: 1e-15, rel: 1e-14, max_panels: 100_000 };
        let panels = ((g * tau) as usize + 8) * 2;
        let integral = |shift: f64| {
            let re = adaptive(|k: f64| (-2.0 * g * (k).cos() * tau + shift * k).cos(), 0.0, PI, panels, tol).value;
            let im = adaptive(|k: f64| (-2.0 * g * (k).cos() * tau + shift * k).sin(), 0.0, PI, panels, tol).value;
            re * re + im * im
        };
        -(g * g) / (4.0 * PI * PI) * (integral(1.0) + integral(-1.0) - 2.0 * integral(0.0))
    }

    #[test]
    fn correlator_matches_momentum_quadrature() {
        for (g, tau) in [(1.0, 3.0), (0.5, 0.1), (0.3, 17.0), (1.0, 0.0)] {
            let a = bulk_correlator(g, tau);
            let b = momentum_correlator(g, tau);
            assert!((a - b).abs() < 1e-8, "g={g} tau={tau}: {a} vs {b}");
        }
    }

    #[test]
    fn correlator_decays() {
        let g = 1.0;
        let c = (50.0..500.0).step_by_f(7.3).into_iter().map(|t| bulk_correlator(g, t).abs() * t).fold(0.0, f64::max);
        let late = (2000.0..3000.0).step_by_f(7.3).into_iter().map(|t| bulk_correlator(g, t).abs() * t).fold(0.0, f64::max);
        assert!(late <= 1.1 * c);
    }

    trait StepBy {
        fn step_by_f(self, step: f64) -> Vec<f64>;
    }
    impl StepBy for std::ops::Range<f64> {
        fn step_by_f(self, step: f64) -> Vec<f64> {
            let n = ((self.end - self.start) / step) as usize;
            (0..n).map(|i| self.start + step * i as f64).collect()
        }
    }

    pub(crate) fn variance_by_quadrature(g: f64, t: f64) -> f64 {
        let panels = ((4.0 * g * t) as usize).max(4);
        2.0 * composite_gauss(|tau| (t - tau) * bulk_correlator(g, tau), 0.0, t, panels, 24)
    }

    #[test]
    fn closed_form_matches_double_integral() {
        for gt in [1e-3, 0.05, 0.5, 1.0, 3.3, 10.0, 50.0, 120.0] {
            let g = 0.8;
            let t = gt / g;
            let a = bulk_variance_closed_form(g, t);
            let b = variance_by_quadrature(g, t);
            assert!((a - b).abs() < 1e-8, "gt={gt}: {a} vs {b}");
        }
    }

    #[test]
    fn closed_form_small_time() {
        assert_eq!(bulk_variance_closed_form(1.0, 0.0), 0.0);
        let (g, t) = (1.0, 1e-6);
        let expected = bulk_correlator(g, 0.0) * t * t;
        assert!((bulk_variance_closed_form(g, t) / expected - 1.0).abs() < 1e-4);
    }

    #[test]
    fn closed_form_approaches_log_law() {
        let g = 1.0;
        assert!((bulk_variance_closed_form(g, 1e3) - bulk_variance_asymptotic(g, 1e3)).abs() < 1e-3);
        let mut early: f64 = 0.0;
        let mut late: f64 = 0.0;
        for i in 0..400 {
            let gt = 10.0 * (100.0f64).powf(i as f64 / 399.0);
            let r = (bulk_variance_closed_form(g, gt) - bulk_variance_asymptotic(g, gt)).abs() * gt;
            if gt < 31.6 {
                early = early.max(r);
            } else {
                late = late.max(r);
            }
        }
        assert!(late <= 1.5 * early, "remainder times gt grows: {early} -> {late}");
    }

    #[test]
    fn closed_form_is_positive_with_small_dips() {
        let mut running_max: f64 = 0.0;
        for i in 1..=4000 {
            let gt = i as f64 * 0.25;
            let v = bulk_variance_closed_form(1.0, gt);
            assert!(v > 0.0, "gt={gt}");
            assert!(running_max - v < 5e-3, "gt={gt}: dip of {}", running_max - v);
            running_max = running_max.max(v);
        }
    }

    #[test]
    fn log_laws() {
        let g = 1.0;
        let expected = (100f64.ln() + EULER_GAMMA + 1.0) / (2.0 * PI * PI);
        assert!((bulk_variance_asymptotic(g, 25.0) - expected).abs() < 1e-15);
        let step = bulk_variance_asymptotic(g, 50.0) - bulk_variance_asymptotic(g, 25.0);
        assert!((step - 2f64.ln() / (2.0 * PI * PI)).abs() < 1e-15);
        let step = sine_kernel_number_variance(20.0) - sine_kernel_number_variance(10.0);
        assert!((step - 2f64.ln() / (PI * PI)).abs() < 1e-15);
        let big = 1e12;
        let ratio = sine_kernel_number_variance(big) / bulk_variance_asymptotic(1.0, big);
        assert!((ratio - 2.0).abs() < 0.05);
    }

    #[test]
    fn localization() {
        assert!((localization_length(0.0, 0.1, 1.0).unwrap() - 9600.0).abs() < 1e-9);
        assert_eq!(localization_length(2.0, 0.1, 1.0).unwrap(), 0.0);
        let r = localization_length(0.3, 0.05, 1.0).unwrap() / localization_length(0.3, 0.1, 1.0).unwrap();
        assert!((r - 4.0).abs() < 1e-12);
        assert!(localization_length(0.0, 0.0, 1.0).is_err());
        assert!(localization_length(2.5, 0.1, 1.0).is_err());
    }
}
