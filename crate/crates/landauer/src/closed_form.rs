use std::f64::consts::PI;

use crate::{LandauerError, TransportSummary};

/// Wide-band-limit transport at finite entropy per tick `sigma`, from the
/// full-bias values: `J tanh(sigma/2)` and `D tanh^2(sigma/2) + J / (2 cosh^2(sigma/2))`.
pub fn wbl_finite_bias(current: f64, diffusion: f64, sigma: f64) -> Result<TransportSummary, LandauerError> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(LandauerError::Domain(format!("entropy must be non-negative, got {sigma}")));
    }
    let t = (sigma / 2.0).tanh();
    let c = (sigma / 2.0).cosh();
    Ok(TransportSummary::new(current * t, diffusion * t * t + current / (2.0 * c * c)))
}

/// Diffusion constant of an ideal boxcar transmission of half-width `2g` at
/// inverse temperature `beta`.
pub fn thermal_boxcar_diffusion(g: f64, beta: f64, sigma: f64) -> Result<f64, LandauerError> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(LandauerError::Domain(format!("inverse temperature must be positive, got {beta}")));
    }
    let x = 2.0 * beta * g;
    Ok(((x - sigma).tanh() + (x + sigma).tanh()) / (2.0 * PI * beta))
}

/// Rough bound on the gap between master-equation and Landauer currents
/// caused by band edges at distance `edge_distance` from the bias window.
pub fn me_lb_gap_bound(t_max: f64, rate: f64, edge_distance: f64) -> Result<f64, LandauerError> {
    if edge_distance.is_nan() || edge_distance <= 0.0 {
        return Err(LandauerError::Domain(format!("edge distance must be positive, got {edge_distance}")));
    }
    Ok(t_max / (2.0 * PI) * rate / edge_distance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wbl_limits() {
        let s = wbl_finite_bias(0.3, 0.01, f64::INFINITY).unwrap();
        assert_eq!((s.current, s.diffusion), (0.3, 0.01));
        let s = wbl_finite_bias(0.3, 0.01, 0.0).unwrap();
        assert_eq!(s.current, 0.0);
        assert!((s.diffusion - 0.15).abs() < 1e-15);
        assert!(s.fano.is_infinite());
        assert!(wbl_finite_bias(0.3, 0.01, -1.0).is_err());
    }

    #[test]
    fn wbl_diffusion_decays_like_exp_minus_sigma() {
        // Vanishing intrinsic noise isolates the thermal term.
        let d = |s: f64| wbl_finite_bias(0.3, 0.0, s).unwrap().diffusion.ln();
        let slope = (d(30.0) - d(20.0)) / 10.0;
        assert!((slope + 1.0).abs() < 0.02, "slope {slope}");
    }

    #[test]
    fn boxcar_closed_form() {
        let (g, beta) = (0.5, 3.0);
        let d0 = thermal_boxcar_diffusion(g, beta, 0.0).unwrap();
        assert!((d0 - (2.0 * beta * g).tanh() / (PI * beta)).abs() < 1e-15);
        let d = |s: f64| thermal_boxcar_diffusion(g, beta, s).unwrap().ln();
        let slope = (d(14.0) - d(12.0)) / 2.0;
        assert!((slope + 2.0).abs() < 1e-6, "slope {slope}");
        let ratio = thermal_boxcar_diffusion(g, beta, 14.0).unwrap()
            / ((4.0 * beta * g).sinh() / beta * (-28.0f64).exp());
        assert!((ratio - 2.0 / PI).abs() < 1e-6);
        for beta in [0.5, 2.0, 10.0, 100.0] {
            let v = 1.0;
            let db = thermal_boxcar_diffusion(g, beta, beta * v / 2.0).unwrap() * beta;
            assert!(db <= 1.0 / PI + 1e-12 && db > 0.0);
        }
        assert!(thermal_boxcar_diffusion(g, 0.0, 1.0).is_err());
    }

    #[test]
    fn gap_bound() {
        assert!((me_lb_gap_bound(1.0, 1.0, 10.0).unwrap() - 1.0 / (20.0 * PI)).abs() < 1e-16);
        assert!(me_lb_gap_bound(1.0, 1.0, 1e300).unwrap() < 1e-299);
        assert!(me_lb_gap_bound(1.0, 1.0, 0.0).is_err());
    }
}
