use crate::error::CliError;

/// Parses `min:max:steps` (linear) or `log:min:max:steps` (geometric).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("grid `{text}`: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let (log, fields) = match parts.as_slice() {
        ["log", rest @ ..] => (true, rest),
        rest => (false, rest),
    };
    let [lo, hi, steps] = fields else {
        return Err(bad("expected [log:]min:max:steps"));
    };
    let lo: f64 = lo.parse().map_err(|_| bad("min is not a number"))?;
    let hi: f64 = hi.parse().map_err(|_| bad("max is not a number"))?;
    let steps: usize = steps.parse().map_err(|_| bad("steps is not a positive integer"))?;
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo || (steps > 1 && hi == lo) {
        return Err(bad("need finite min < max and steps >= 1"));
    }
    if log && lo <= 0.0 {
        return Err(bad("a log grid needs min > 0"));
    }
    let at = |i: usize| if steps == 1 { 0.0 } else { i as f64 / (steps - 1) as f64 };
    Ok((0..steps)
        .map(|i| if log { (lo.ln() + (hi.ln() - lo.ln()) * at(i)).exp() } else { lo + (hi - lo) * at(i) })
        .collect())
}

/// Derivative of `ys` on a non-uniform grid: one-sided at the ends, the
/// three-point formula inside.
pub fn slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n < 2 {
        return vec![f64::NAN; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (ys[1] - ys[0]) / (xs[1] - xs[0])
            } else if i == n - 1 {
                (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
            } else {
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                (h0 * h0 * ys[i + 1] - h1 * h1 * ys[i - 1] + (h1 * h1 - h0 * h0) * ys[i]) / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}
