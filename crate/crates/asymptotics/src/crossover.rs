use std::f64::consts::PI;

use crate::special::lambert_w_minus1;
use crate::AsymptoticsError;

/// Time at which the diffusive variance `D t` overtakes the logarithmic
/// growth `(1/2pi) ln(J t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    /// Later root of `(1/2pi) ln(J t) = D t`, from the lower Lambert branch.
    pub lambert: f64,
    /// Leading-order scaling `ln(J/D)/D`.
    pub leading: f64,
}

pub fn crossover_time(current: f64, diffusion: f64) -> Result<Crossover, AsymptoticsError> {
    if !(current > 0.0 && diffusion > 0.0) {
        return Err(AsymptoticsError::Domain(format!(
            "current and diffusion must be positive, got J={current}, D={diffusion}"
        )));
    }
    let ratio = 2.0 * PI * diffusion / current;
    let w = lambert_w_minus1(-ratio).ok_or(AsymptoticsError::NoCrossing { ratio })?;
    let x = -w / ratio;
    Ok(Crossover { lambert: x / current, leading: (current / diffusion).ln() / diffusion })
}

/// Thermal cross-over scaling `sigma e^sigma / J`.
pub fn thermal_crossover(current: f64, sigma: f64) -> Result<f64, AsymptoticsError> {
    if !(sigma > 1.0) {
        return Err(AsymptoticsError::Domain(format!("thermal scaling needs sigma > 1, got {sigma}")));
    }
    if !(current > 0.0) {
        return Err(AsymptoticsError::Domain(format!("current must be positive, got {current}")));
    }
    Ok(sigma * sigma.exp() / current)
}

/// Disorder-dominated cross-over and whether its regime
/// `D/J << (eps/eps0)^2 << 1` holds for the supplied values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderCrossover {
    pub time: f64,
    pub regime_holds: bool,
    /// `(eps/eps0)^2`, to compare with `D/J` and 1.
    pub disorder_ratio: f64,
}

/// `(eps0/eps)^2 / J`. Regime violations are reported, not rejected; "much
/// less than" is taken as a factor of 10.
pub fn disorder_crossover(
    current: f64,
    diffusion: f64,
    eps: f64,
    eps0: f64,
) -> Result<DisorderCrossover, AsymptoticsError> {
    if !(current > 0.0 && eps > 0.0 && eps0 > 0.0 && diffusion >= 0.0) {
        return Err(AsymptoticsError::Domain(format!(
            "need J > 0, eps > 0, eps0 > 0, D >= 0; got J={current}, eps={eps}, eps0={eps0}, D={diffusion}"
        )));
    }
    let disorder_ratio = (eps / eps0).powi(2);
    let regime_holds = 10.0 * diffusion / current <= disorder_ratio && 10.0 * disorder_ratio <= 1.0;
    Ok(DisorderCrossover { time: 1.0 / (disorder_ratio * current), regime_holds, disorder_ratio })
}
