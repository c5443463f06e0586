use rand::Rng;

/// Mean and standard error of the mean; the error is NaN for one sample.
pub fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (variance / n).sqrt())
}

/// Master seed of grid cell `cell`, drawn from the cell's stream of `seed`.
pub fn cell_seed(seed: u64, cell: u64) -> u64 {
    chain_core::sample_stream(seed, cell).random()
}

/// Stream index of `sample` within grid cell `cell`.
pub fn cell_stream(cell: u64, sample: u64) -> u64 {
    (cell << 32) | sample
}

/// `n` integers spread logarithmically over `[first, last]`, deduplicated.
pub fn log_integers(first: usize, last: usize, n: usize) -> Vec<usize> {
    let (a, b) = ((first.max(1) as f64).ln(), (last.max(first).max(1) as f64).ln());
    let mut values: Vec<usize> = (0..n)
        .map(|k| {
            let x = if n > 1 { a + (b - a) * k as f64 / (n - 1) as f64 } else { a };
            x.exp().round() as usize
        })
        .collect();
    values.dedup();
    values
}
