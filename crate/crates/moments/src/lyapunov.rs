use chain_core::{CMat, Complex64};

use crate::MomentsError;

/// Complex Schur form of a Hurwitz matrix `K`, reused for repeated solves of
/// `K X + X K^dagger = Y` (Bartels–Stewart).
#[derive(Debug, Clone)]
pub struct Lyapunov {
    unitary: CMat,
    triangular: CMat,
}

impl Lyapunov {
    pub fn new(drift: &CMat) -> Result<Self, MomentsError> {
        let (unitary, triangular) = chain_core::linalg::schur(drift)?;
        let scale = drift.norm().max(f64::MIN_POSITIVE);
        if let Some(bad) = triangular.diagonal().iter().find(|l| l.re >= -1e-14 * scale) {
            return Err(MomentsError::NotHurwitz(*bad));
        }
        Ok(Self { unitary, triangular })
    }

    pub fn dim(&self) -> usize {
        self.triangular.nrows()
    }

    /// Eigenvalues of `K`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.triangular.diagonal().iter().copied().collect()
    }

    /// Solves `K X + X K^dagger = rhs`.
    pub fn solve(&self, rhs: &CMat) -> CMat {
        let n = self.dim();
        let t = &self.triangular;
        let y = self.unitary.adjoint() * rhs * &self.unitary;
        let mut x = CMat::zeros(n, n);
        for j in (0..n).rev() {
            for i in (0..n).rev() {
                let mut acc = y[(i, j)];
                for k in i + 1..n {
                    acc -= t[(i, k)] * x[(k, j)];
                }
                for k in j + 1..n {
                    acc -= x[(i, k)] * t[(j, k)].conj();
                }
                x[(i, j)] = acc / (t[(i, i)] + t[(j, j)].conj());
            }
        }
        &self.unitary * x * self.unitary.adjoint()
    }
}

/// Solves `K X + X K^dagger = Y` for Hurwitz `K`.
pub fn lyapunov_solve(drift: &CMat, rhs: &CMat) -> Result<CMat, MomentsError> {
    Ok(Lyapunov::new(drift)?.solve(rhs))
}
