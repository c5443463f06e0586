/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct SimplexSettings {
    pub max_evaluations: usize,
    /// A simplex has converged when `f_max - f_min <= rel_tol * |f_min|`
    /// and every vertex lies within `x_tol` (max norm) of the best one.
    pub rel_tol: f64,
    pub x_tol: f64,
}

impl Default for SimplexSettings {
    fn default() -> Self {
        Self { max_evaluations: 4000, rel_tol: 1e-10, x_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Counted<'a, F> {
    f: &'a F,
    calls: usize,
    limit: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.calls += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn exhausted(&self) -> bool {
        self.calls >= self.limit
    }
}

/// Nelder–Mead with standard coefficients (1, 2, 1/2, 1/2).
///
/// Whenever a simplex collapses the search restarts from a fresh simplex
/// around the best vertex with a halved step, and stops once such a restart
/// brings no relative improvement beyond `rel_tol`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, settings: SimplexSettings) -> SimplexOutcome {
    let mut counted = Counted { f, calls: 0, limit: settings.max_evaluations.max(start.len() + 2) };
    let mut best_point = start.to_vec();
    let mut best_value = counted.call(start);
    let mut step = step;
    let mut converged = false;
    while !counted.exhausted() {
        let (point, value, collapsed) = single_run(&mut counted, &best_point, best_value, step, settings);
        let gain = best_value - value;
        if value < best_value {
            best_point = point;
            best_value = value;
        }
        if !collapsed {
            break;
        }
        if gain <= settings.rel_tol * best_value.abs() {
            converged = true;
            break;
        }
        step = (0.5 * step).max(1e-4);
    }
    SimplexOutcome { point: best_point, value: best_value, evaluations: counted.calls, converged }
}

/// One simplex run; returns the best vertex and whether the simplex collapsed
/// (as opposed to running out of evaluations).
fn single_run<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<'_, F>,
    start: &[f64],
    start_value: f64,
    step: f64,
    settings: SimplexSettings,
) -> (Vec<f64>, f64, bool) {
    let n = start.len();
    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    vertices.push((start.to_vec(), start_value));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += step;
        let v = f.call(&x);
        vertices.push((x, v));
    }
    loop {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (vertices[0].1, vertices[n].1);
        let spread = vertices[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&vertices[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let flat = (hi - lo).abs() <= settings.rel_tol * lo.abs() && spread <= settings.x_tol;
        if flat || (lo.is_infinite() && hi.is_infinite()) {
            return (vertices[0].0.clone(), lo, true);
        }
        if f.exhausted() {
            return (vertices[0].0.clone(), lo, false);
        }
        let centroid: Vec<f64> = (0..n).map(|k| vertices[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&vertices[n].0).map(|(c, w)| c + t * (c - w)).collect() };

        let reflected = along(1.0);
        let fr = f.call(&reflected);
        if fr < vertices[0].1 {
            let expanded = along(2.0);
            let fe = f.call(&expanded);
            vertices[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < vertices[n - 1].1 {
            vertices[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < vertices[n].1 {
                let c = along(0.5);
                let v = f.call(&c);
                (c, v)
            } else {
                let c = along(-0.5);
                let v = f.call(&c);
                (c, v)
            };
            if fc < vertices[n].1.min(fr) {
                vertices[n] = (contracted, fc);
            } else {
                let best = vertices[0].0.clone();
                for vertex in vertices.iter_mut().skip(1) {
                    let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let v = f.call(&x);
                    *vertex = (x, v);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(&rosen, &[-1.2, 1.0], 0.5, SimplexSettings { max_evaluations: 5000, rel_tol: 1e-14, x_tol: 1e-8 });
        assert!((out.point[0] - 1.0).abs() < 1e-5 && (out.point[1] - 1.0).abs() < 1e-5, "{:?}", out);
        assert!(out.converged);
    }

    #[test]
    fn budget_stops_search() {
        let quad = |x: &[f64]| x.iter().map(|v| (v - 3.0).powi(2)).sum::<f64>();
        let out = nelder_mead(&quad, &[0.0; 5], 0.1, SimplexSettings { max_evaluations: 20, ..SimplexSettings::default() });
        assert!(!out.converged);
        assert!(out.evaluations <= 22);
        assert!(out.value < quad(&[0.0; 5]));
    }

    #[test]
    fn one_dimensional() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 1.0;
        let out = nelder_mead(&f, &[2.0], 0.5, SimplexSettings::default());
        assert!((out.point[0] - 0.3).abs() < 1e-4);
    }
}
