//! Dense complex linear algebra on top of nalgebra.

use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::{ChainError, CMat};

/// Dense complex column vector.
pub type DVec = nalgebra::DVector<Complex64>;

/// Complex Schur form `A = Q T Q^dagger`, returned as `(Q, T)`.
///
/// The shifted QR iteration can cycle on matrices with exact symmetries
/// (the uniform trimer with `g = 0.6` and unit rates is one). On failure the
/// iteration is retried on `U^dagger A U` for a few fixed dense unitaries `U`.
pub fn schur(a: &CMat) -> Result<(CMat, CMat), ChainError> {
    if let Some(s) = Schur::try_new(a.clone(), f64::EPSILON, 10_000) {
        return Ok(s.unpack());
    }
    let n = a.nrows();
    for attempt in 1..=3u32 {
        let seed = CMat::from_fn(n, n, |i, j| {
            let phase = (7 * i + 3 * j) as f64 + f64::from(attempt);
            Complex64::new(phase.cos() + if i == j { 2.0 } else { 0.0 }, phase.sin())
        });
        let rotation = seed.qr().q();
        let rotated = rotation.adjoint() * a * &rotation;
        if let Some(s) = Schur::try_new(rotated, f64::EPSILON, 10_000) {
            let (q, t) = s.unpack();
            return Ok((rotation * q, t));
        }
    }
    Err(ChainError::Linalg("Schur iteration did not converge".into()))
}

/// Right eigenvectors of a diagonalizable matrix, `A = V diag(values) V^-1`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
    pub inverse: CMat,
}

impl EigenDecomposition {
    /// Builds the decomposition from a complex Schur form. Eigenvectors of the
    /// triangular factor come from back substitution.
    pub fn new(a: &CMat) -> Result<Self, ChainError> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(ChainError::Linalg("eigendecomposition needs a non-empty square matrix".into()));
        }
        let (q, t) = schur(a)?;
        let scale = a.norm().max(f64::MIN_POSITIVE);
        let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
        let mut x = CMat::zeros(n, n);
        for k in 0..n {
            x[(k, k)] = Complex64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in i + 1..=k {
                    acc += t[(i, j)] * x[(j, k)];
                }
                let mut denom = t[(i, i)] - t[(k, k)];
                if denom.norm() < f64::EPSILON * scale {
                    denom = Complex64::new(f64::EPSILON * scale, 0.0);
                }
                x[(i, k)] = -acc / denom;
            }
        }
        let mut vectors = q * x;
        for mut col in vectors.column_iter_mut() {
            let norm = col.norm();
            col /= Complex64::new(norm, 0.0);
        }
        let inverse = vectors
            .clone()
            .try_inverse()
            .ok_or_else(|| ChainError::Linalg("eigenvector matrix is singular".into()))?;
        Ok(Self { values, vectors, inverse })
    }

    /// Two-norm condition number of the eigenvector matrix.
    pub fn condition(&self) -> f64 {
        condition_number(&self.vectors)
    }

    /// Smallest pairwise distance between eigenvalues.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.values.iter().enumerate() {
            for b in &self.values[i + 1..] {
                gap = gap.min((a - b).norm());
            }
        }
        gap
    }

    pub fn reconstruct(&self) -> CMat {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        &self.vectors * d * &self.inverse
    }
}

pub fn condition_number(a: &CMat) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigenvalues of a complex symmetric tridiagonal matrix by implicit QL with
/// complex orthogonal rotations, `O(n^2)` in total.
///
/// These rotations are not unitary and can break down when `f^2 + g^2`
/// nearly vanishes; that case, and any failure of the trace checks, is
/// reported as an error so callers can fall back to [`EigenDecomposition`].
pub fn tridiagonal_eigenvalues(diagonal: &[Complex64], off_diagonal: &[f64]) -> Result<Vec<Complex64>, ChainError> {
    let n = diagonal.len();
    if n == 0 || off_diagonal.len() + 1 != n {
        return Err(ChainError::Linalg("tridiagonal matrix needs n diagonal and n-1 off-diagonal entries".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut d = diagonal.to_vec();
    let mut e: Vec<Complex64> = off_diagonal.iter().map(|&g| Complex64::new(g, 0.0)).chain([zero]).collect();
    let scale = d.iter().map(|x| x.norm()).chain(off_diagonal.iter().map(|g| 2.0 * g.abs())).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(d);
    }
    let breakdown = || ChainError::Linalg("complex orthogonal QL broke down".into());

    for l in 0..n {
        let mut iterations = 0;
        'deflate: loop {
            let mut m = l;
            while m + 1 < n {
                let local = d[m].norm() + d[m + 1].norm() + 1e-3 * scale;
                if e[m].norm() <= f64::EPSILON * local {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(ChainError::Linalg("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let root = (g * g + one).sqrt();
            let denom = if (g + root).norm() >= (g - root).norm() { g + root } else { g - root };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c, mut p) = (one, one, zero);
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == zero && f == zero && g == zero {
                    d[i + 1] -= p;
                    e[m] = zero;
                    continue 'deflate;
                }
                if r.norm() < 1e-4 * (f.norm() + g.norm()) {
                    return Err(breakdown());
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
        }
    }

    let trace: Complex64 = diagonal.iter().sum();
    let trace_sq: Complex64 =
        diagonal.iter().map(|x| x * x).sum::<Complex64>() + 2.0 * off_diagonal.iter().map(|g| g * g).sum::<f64>();
    let sum: Complex64 = d.iter().sum();
    let sum_sq: Complex64 = d.iter().map(|x| x * x).sum();
    let tol = 1e-10 * n as f64;
    if (sum - trace).norm() > tol * scale || (sum_sq - trace_sq).norm() > tol * scale * scale {
        return Err(breakdown());
    }
    Ok(d)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat, ChainError> {
    a.clone().lu().solve(b).ok_or_else(|| ChainError::Linalg("singular linear system".into()))
}

/// Real eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm(a: &CMat) -> CMat {
    a.exp()
}

/// Replaces `a` by its Hermitian part in place.
pub fn hermitize(a: &mut CMat) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)].im = 0.0;
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}

/// Projector onto site `k` of an `n`-site chain.
pub fn site_projector(n: usize, k: usize) -> CMat {
    let mut p = CMat::zeros(n, n);
    p[(k, k)] = Complex64::new(1.0, 0.0);
    p
}
