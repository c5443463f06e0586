use std::f64::consts::PI;
use std::sync::OnceLock;

use chain_core::quad::{self, gauss_legendre, Tolerance};
use chain_core::{ChainSpec, CMat, Complex64, EffectiveHamiltonian};
use landauer::{transport_zero_t, wbl_finite_bias};
use proptest::prelude::*;
use moments::{levitov_lesovik_cumulants, levitov_lesovik_log_mgf, log_times, Lyapunov, MomentModel};

fn optimized(n_sites: usize) -> ChainSpec {
    static PROFILES: OnceLock<Vec<(usize, ChainSpec)>> = OnceLock::new();
    let profiles = PROFILES.get_or_init(|| {
        [20, 40]
            .into_iter()
            .map(|n| (n, optimizer::optimize_couplings(n, 1.0, None, 4000, 0).unwrap().spec(1.0).unwrap()))
            .collect()
    });
    profiles.iter().find(|(n, _)| *n == n_sites).unwrap().1.clone()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn full_bias_matches_landauer() {
    let random = ChainSpec::new(vec![0.3, 0.9, 0.55, 0.7, 0.2, 0.6]).unwrap().with_rate(0.7).unwrap();
    for spec in [optimized(20), ChainSpec::uniform(9, 0.45).unwrap(), random] {
        let model = MomentModel::from_spec(&spec).unwrap();
        let lb = transport_zero_t(&EffectiveHamiltonian::clean(&spec)).unwrap();
        assert!((model.current() - lb.current).abs() < 1e-8, "{} vs {}", model.current(), lb.current);
        let d = model.diffusion().unwrap();
        assert!(relative(d, lb.diffusion) < 1e-6, "{d} vs {}", lb.diffusion);
    }
}

#[test]
fn finite_bias_follows_the_wide_band_identity() {
    let clean = optimized(40);
    let full = MomentModel::from_spec(&clean).unwrap();
    let sigma = 5.5;
    let expected = wbl_finite_bias(full.current(), full.diffusion().unwrap(), sigma).unwrap();
    let thermal = MomentModel::from_spec(&clean.with_entropy(sigma).unwrap()).unwrap();
    assert!((thermal.current() - expected.current).abs() < 1e-8);
    assert!((thermal.diffusion().unwrap() - expected.diffusion).abs() < 1e-6);
}

#[test]
fn backward_jumps_add_activity() {
    let spec = optimized(20).with_entropy(5.5).unwrap();
    let model = MomentModel::from_spec(&spec).unwrap();
    assert!(model.activity() > model.current());
}

#[test]
fn every_bond_shares_the_boundary_diffusion() {
    let spec = ChainSpec::new(vec![0.4, 0.75, 0.6, 0.9, 0.6, 0.75, 0.4]).unwrap().with_entropy(2.5).unwrap();
    let model = MomentModel::from_spec(&spec).unwrap();
    let d = model.diffusion().unwrap();
    for bond in 1..spec.n_sites() {
        assert!(relative(model.bond_diffusion(bond).unwrap(), d) < 1e-8);
    }
}

#[test]
fn boundary_variance_shape() {
    let spec = optimized(20);
    let model = MomentModel::from_spec(&spec).unwrap();
    let times = log_times(1e-3, 1e5, 60);
    let curve = model.number_variance(&times).unwrap();
    assert_eq!(curve.variance[0], 0.0);
    assert!(curve.variance.windows(2).all(|w| w[1] >= w[0]));
    let early = curve.times.iter().zip(&curve.variance).filter(|(t, _)| **t > 0.0 && **t < 0.01);
    for (t, v) in early {
        assert!(relative(v / t, curve.activity) < 0.05);
    }

    let relaxation = Lyapunov::new(&model.drift().drift)
        .unwrap()
        .eigenvalues()
        .iter()
        .map(|l| -1.0 / l.re)
        .fold(0.0, f64::max);
    let (t1, t2) = (60.0 * relaxation, 120.0 * relaxation);
    let late = model.number_variance(&[t1, t2]).unwrap();
    let slope = (late.variance[1] - late.variance[0]) / (t2 - t1);
    assert!(relative(slope, curve.diffusion) < 1e-6, "{slope} vs {}", curve.diffusion);
}

#[test]
fn outermost_bond_tracks_the_boundary_count() {
    // Below J t ~ 1 the boundary count is shot-noise dominated (A t) while the
    // bond current variance starts as t^2, so the comparison starts at J t = 5.
    let spec = optimized(40);
    let model = MomentModel::from_spec(&spec).unwrap();
    let current = model.current();
    let times = log_times(5.0 / current, 1e4 / current, 30);
    let boundary = model.number_variance(&times).unwrap();
    let bond = model.bond_number_variance(1, &times).unwrap();
    for (b, k) in boundary.variance.iter().zip(&bond.variance).skip(1) {
        assert!(relative(*k, *b) < 0.05, "{k} vs {b}");
    }
    let early = model.bond_number_variance(1, &[0.0, 1e-3]).unwrap();
    assert!(early.variance[1] < 0.01 * model.number_variance(&[0.0, 1e-3]).unwrap().variance[1]);
}

#[test]
fn middle_bond_carries_half_the_fluctuations() {
    let spec = optimized(40);
    let model = MomentModel::from_spec(&spec).unwrap();
    let current = model.current();
    let times = log_times(1.0 / current, 20.0 / current, 12);
    let boundary = model.number_variance(&times).unwrap();
    let middle = model.bond_number_variance(20, &times).unwrap();
    for (b, m) in boundary.variance.iter().zip(&middle.variance).skip(1) {
        assert!((m / b - 0.5).abs() < 0.05, "ratio {}", m / b);
    }
}

/// Sine-kernel covariance on a Gauss–Legendre grid of `[0, x]`.
fn sine_kernel(x: f64, nodes: usize) -> CMat {
    let (s, w) = gauss_legendre(nodes);
    let points: Vec<f64> = s.iter().map(|u| 0.5 * x * (u + 1.0)).collect();
    let weights: Vec<f64> = w.iter().map(|v| 0.5 * x * v).collect();
    CMat::from_fn(nodes, nodes, |i, j| {
        let d = PI * (points[i] - points[j]);
        let kernel = if d == 0.0 { 1.0 } else { d.sin() / d };
        Complex64::new((weights[i] * weights[j]).sqrt() * kernel, 0.0)
    })
}

#[test]
fn sine_kernel_number_variance() {
    let x = 10.0;
    let sinc2 = |u: f64| if u == 0.0 { 1.0 } else { ((PI * u).sin() / (PI * u)).powi(2) };
    let exact = x - 2.0 * quad::adaptive(|u| (x - u) * sinc2(u), 0.0, x, 16, Tolerance::default()).value;
    let identity = CMat::identity(80, 80);
    let errors: Vec<f64> = [20, 40, 80]
        .into_iter()
        .map(|nodes| {
            let kernel = sine_kernel(x, nodes);
            let (_, variance) = levitov_lesovik_cumulants(&kernel, &CMat::identity(nodes, nodes));
            (variance - exact).abs()
        })
        .collect();
    assert!(errors[2] < 1e-10 && errors[1] < errors[0], "{errors:?}");

    let kernel = sine_kernel(x, 80);
    let h = 1e-3;
    let f = |l: f64| levitov_lesovik_log_mgf(&kernel, &identity, l).unwrap();
    let from_determinant = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    assert!(relative(from_determinant, exact) < 1e-5);
    let asymptotic = asymptotics::sine_kernel_number_variance(x);
    assert!(relative(from_determinant, asymptotic) < 0.02, "{from_determinant} vs {asymptotic}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_chains_agree_with_landauer(couplings in proptest::collection::vec(0.1f64..1.5, 1..12), rate in 0.3f64..2.0) {
        let spec = ChainSpec::new(couplings).unwrap().with_rate(rate).unwrap();
        let model = MomentModel::from_spec(&spec).unwrap();
        let (values, _) = chain_core::linalg::hermitian_eigen(model.covariance());
        prop_assert!(values.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        let lb = transport_zero_t(&EffectiveHamiltonian::clean(&spec)).unwrap();
        prop_assert!((model.current() - lb.current).abs() < 1e-8);
        prop_assert!(relative(model.diffusion().unwrap(), lb.diffusion) < 1e-6);
    }
}
