use chain_core::linalg::hermitian_eigen;
use chain_core::{CMat, Complex64};

use crate::MomentsError;

/// Cumulant generating function `log det[I + C (e^{lambda O} - I)]` of the
/// quadratic observable with one-body matrix `O` (trace convention,
/// `<O> = tr[C O]`) in the Gaussian state with covariance `C`.
pub fn levitov_lesovik_log_mgf(covariance: &CMat, counting: &CMat, lambda: f64) -> Result<f64, MomentsError> {
    let n = covariance.nrows();
    if covariance.ncols() != n || counting.shape() != (n, n) {
        return Err(MomentsError::Domain("covariance and counting matrices must be square and equal in size".into()));
    }
    let (values, vectors) = hermitian_eigen(counting);
    let mut scaled = vectors.clone();
    for (mut col, mu) in scaled.column_iter_mut().zip(&values) {
        col *= Complex64::new((lambda * mu).exp_m1(), 0.0);
    }
    let tilt = scaled * vectors.adjoint();
    let det = (CMat::identity(n, n) + covariance * tilt).lu().determinant();
    if !(det.re > 0.0) || det.im.abs() > 1e-8 * det.re {
        return Err(MomentsError::Domain(format!("determinant {det} is not positive at lambda = {lambda}")));
    }
    Ok(det.re.ln())
}

/// Mean `tr[C O]` and variance `tr[C O^2] - tr[(C O)^2]`.
pub fn levitov_lesovik_cumulants(covariance: &CMat, counting: &CMat) -> (f64, f64) {
    let co = covariance * counting;
    let mean = co.trace().re;
    let variance = (&co * counting).trace().re - (&co * &co).trace().re;
    (mean, variance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0))))
    }

    #[test]
    fn zero_field_is_zero() {
        let c = diag(&[0.2, 0.7]);
        assert_eq!(levitov_lesovik_log_mgf(&c, &diag(&[1.0, 1.0]), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_is_bernoulli() {
        let n = 0.3f64;
        for lambda in [-2.0, -0.1, 0.5, 3.0] {
            let got = levitov_lesovik_log_mgf(&diag(&[n]), &diag(&[1.0]), lambda).unwrap();
            assert!((got - (1.0 - n + n * f64::exp(lambda)).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn filled_mode_beyond_radius_is_rejected() {
        let c = diag(&[1.0]);
        let o = diag(&[1.0]);
        assert!(levitov_lesovik_log_mgf(&c, &o, f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn derivatives_are_the_cumulants() {
        let c = CMat::from_row_slice(2, 2, &[
            Complex64::new(0.6, 0.0), Complex64::new(0.1, 0.2),
            Complex64::new(0.1, -0.2), Complex64::new(0.3, 0.0),
        ]);
        let o = CMat::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.5),
            Complex64::new(0.0, 0.5), Complex64::new(-0.2, 0.0),
        ]);
        let (mean, variance) = levitov_lesovik_cumulants(&c, &o);
        let h = 1e-4;
        let f = |l: f64| levitov_lesovik_log_mgf(&c, &o, l).unwrap();
        assert!(((f(h) - f(-h)) / (2.0 * h) - mean).abs() < 1e-6);
        assert!(((f(h) - 2.0 * f(0.0) + f(-h)) / (h * h) - variance).abs() < 1e-6);
    }
}
