use serde::{Deserialize, Serialize};

use crate::OptimizerError;

/// `y = prefactor * x^exponent` fitted by least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// One-sigma standard error of the exponent.
    pub exponent_err: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit, OptimizerError> {
    if xs.len() != ys.len() {
        return Err(OptimizerError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(OptimizerError::TooFewPoints(xs.len()));
    }
    if let Some((&x, &y)) = xs.iter().zip(ys).find(|(&x, &y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(OptimizerError::NonPositive { x, y });
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    let exponent_err = (rss / (n - 2.0) / sxx).sqrt();
    Ok(PowerLawFit { exponent, prefactor: intercept.exp(), exponent_err })
}
