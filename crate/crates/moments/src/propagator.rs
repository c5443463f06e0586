use chain_core::linalg::{expm, EigenDecomposition};
use chain_core::{CMat, Complex64};

/// Largest eigenvector condition number for which `e^{Kt}` is taken from the
/// eigendecomposition; beyond it each time uses scaling and squaring.
pub const CONDITION_LIMIT: f64 = 1e6;

/// Evaluates `e^{Kt}` for many times.
#[derive(Debug, Clone)]
pub enum Propagator {
    Spectral(EigenDecomposition),
    Pade(CMat),
}

impl Propagator {
    pub fn new(generator: &CMat) -> Self {
        match EigenDecomposition::new(generator) {
            Ok(dec) if dec.condition() < CONDITION_LIMIT => Self::Spectral(dec),
            _ => Self::Pade(generator.clone()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Spectral(dec) => dec.values.len(),
            Self::Pade(generator) => generator.nrows(),
        }
    }

    pub fn at(&self, t: f64) -> CMat {
        match self {
            _ if t == 0.0 => {
                let n = self.dim();
                CMat::identity(n, n)
            }
            Self::Spectral(dec) => {
                let mut scaled = dec.vectors.clone();
                for (mut col, l) in scaled.column_iter_mut().zip(&dec.values) {
                    col *= (l * t).exp();
                }
                scaled * &dec.inverse
            }
            Self::Pade(generator) => expm(&(generator * Complex64::new(t, 0.0))),
        }
    }
}
