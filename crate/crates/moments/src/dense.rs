//! Many-body Lindblad oracle for chains of at most [`MAX_SITES`] sites.
//!
//! The generator acts on column-stacked density matrices of the full Fock
//! space, built from spin ladder operators: the hopping is
//! `g (s_i^+ s_{i+1}^- + h.c.)`, the left reservoir acts through `s_1^+` and
//! `s_1^-`, the right one through `s_N^-` and `s_N^+`. Fermionic correlations
//! use the Jordan–Wigner string, so nothing here relies on Gaussian algebra.

use chain_core::{CMat, Complex64, EffectiveHamiltonian, Occupations};
use nalgebra::DVector;

use crate::MomentsError;

pub const MAX_SITES: usize = 4;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `s_j^-` in the occupation basis, site `j` stored in bit `j`.
pub fn lowering(n_sites: usize, site: usize) -> CMat {
    let dim = 1 << n_sites;
    let mut m = CMat::zeros(dim, dim);
    for state in (0..dim).filter(|s| s & (1 << site) != 0) {
        m[(state ^ (1 << site), state)] = real(1.0);
    }
    m
}

/// Fermionic `c_j` with the string over sites `< j`.
pub fn annihilator(n_sites: usize, site: usize) -> CMat {
    let mut m = lowering(n_sites, site);
    for state in 0..1usize << n_sites {
        if (state & ((1 << site) - 1)).count_ones() % 2 == 1 {
            m.column_mut(state).neg_mut();
        }
    }
    m
}

/// Superoperator of `rho -> left rho right` on column-stacked `rho`.
fn sandwich(left: &CMat, right: &CMat) -> CMat {
    right.transpose().kronecker(left)
}

#[derive(Debug, Clone)]
pub struct DenseLindblad {
    dim: usize,
    generator: CMat,
    emission: CMat,
    absorption: CMat,
    last_lowering: CMat,
    annihilators: Vec<CMat>,
}

impl DenseLindblad {
    pub fn new(hamiltonian: &EffectiveHamiltonian, occupations: Occupations) -> Result<Self, MomentsError> {
        let n = hamiltonian.dim();
        if n > MAX_SITES {
            return Err(MomentsError::Domain(format!("dense oracle supports at most {MAX_SITES} sites, got {n}")));
        }
        let dim = 1 << n;
        let eye = CMat::identity(dim, dim);
        let lowers: Vec<CMat> = (0..n).map(|j| lowering(n, j)).collect();
        let mut h = CMat::zeros(dim, dim);
        for (j, &w) in hamiltonian.shifts().iter().enumerate() {
            h += lowers[j].adjoint() * &lowers[j] * real(w);
        }
        for (j, &g) in hamiltonian.couplings().iter().enumerate() {
            let hop = lowers[j].adjoint() * &lowers[j + 1];
            h += (&hop + hop.adjoint()) * real(g);
        }
        let rates = hamiltonian.rates();
        let last = &lowers[n - 1];
        let channels = [
            (lowers[0].adjoint(), rates.left * occupations.left),
            (lowers[0].clone(), rates.left * (1.0 - occupations.left)),
            (last.adjoint(), rates.right * occupations.right),
            (last.clone(), rates.right * (1.0 - occupations.right)),
        ];
        let mut generator = (sandwich(&h, &eye) - sandwich(&eye, &h)) * Complex64::new(0.0, -1.0);
        let mut jumps = Vec::with_capacity(4);
        for (op, rate) in &channels {
            let jump = sandwich(op, &op.adjoint()) * real(*rate);
            let decay = op.adjoint() * op * real(rate / 2.0);
            generator += &jump - sandwich(&decay, &eye) - sandwich(&eye, &decay);
            jumps.push(jump);
        }
        Ok(Self {
            dim,
            generator,
            emission: jumps[3].clone(),
            absorption: jumps[2].clone(),
            last_lowering: last.clone(),
            annihilators: (0..n).map(|j| annihilator(n, j)).collect(),
        })
    }

    fn vec(rho: &CMat) -> DVector<Complex64> {
        DVector::from_column_slice(rho.as_slice())
    }

    fn unvec(&self, v: &DVector<Complex64>) -> CMat {
        CMat::from_column_slice(self.dim, self.dim, v.as_slice())
    }

    fn trace_row(&self) -> nalgebra::RowDVector<Complex64> {
        let mut row = nalgebra::RowDVector::zeros(self.dim * self.dim);
        for i in 0..self.dim {
            row[i * self.dim + i] = real(1.0);
        }
        row
    }

    /// The unique trace-one fixed point of the generator.
    pub fn steady_state(&self) -> Result<CMat, MomentsError> {
        let mut system = self.generator.clone();
        system.set_row(0, &self.trace_row());
        let mut rhs = DVector::zeros(self.dim * self.dim);
        rhs[0] = real(1.0);
        let v = system.lu().solve(&rhs).ok_or_else(|| MomentsError::Linalg("dense steady state is not unique".into()))?;
        Ok(self.unvec(&v))
    }

    pub fn evolve(&self, rho: &CMat, t: f64) -> CMat {
        let e = (&self.generator * real(t)).exp();
        self.unvec(&(e * Self::vec(rho)))
    }

    /// `C_ij = tr[rho c_i^dagger c_j]`.
    pub fn one_body(&self, rho: &CMat) -> CMat {
        let n = self.annihilators.len();
        CMat::from_fn(n, n, |i, j| (rho * self.annihilators[i].adjoint() * &self.annihilators[j]).trace())
    }

    /// Many-body operator `sum_xy O_xy c_y^dagger c_x`, whose mean is `tr[O C]`.
    pub fn quadratic(&self, one_body: &CMat) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (x, cx) in self.annihilators.iter().enumerate() {
            for (y, cy) in self.annihilators.iter().enumerate() {
                if one_body[(x, y)] != Complex64::new(0.0, 0.0) {
                    m += cy.adjoint() * cx * one_body[(x, y)];
                }
            }
        }
        m
    }

    fn rate(&self, jump: &CMat, rho: &CMat) -> f64 {
        (self.trace_row() * jump * Self::vec(rho))[0].re
    }

    /// Net particle current into the right reservoir.
    pub fn right_current(&self, rho: &CMat) -> f64 {
        self.rate(&self.emission, rho) - self.rate(&self.absorption, rho)
    }

    /// Total rate of right-lead jumps in either direction.
    pub fn right_activity(&self, rho: &CMat) -> f64 {
        self.rate(&self.emission, rho) + self.rate(&self.absorption, rho)
    }

    /// Regular part of the stationary correlator of the net right-lead
    /// current, `<I(tau) I(0)> - J^2` for `tau > 0`.
    pub fn jump_correlator(&self, rho: &CMat, tau: f64) -> f64 {
        let net = &self.emission - &self.absorption;
        let e = (&self.generator * real(tau)).exp();
        let after = &net * Self::vec(rho);
        let current = (self.trace_row() * &after)[0].re;
        (self.trace_row() * &net * e * after)[0].re - current * current
    }

    /// Normalized state right after an emission into the right reservoir.
    pub fn after_emission(&self, rho: &CMat) -> CMat {
        let post = &self.last_lowering * rho * self.last_lowering.adjoint();
        let norm = post.trace();
        post / norm
    }

    /// Variance of the net count at the right lead over `[0, t]` from `rho`,
    /// the second derivative of the tilted generator's propagator in the
    /// counting field (block-triangular exponential).
    pub fn counting_variance(&self, rho: &CMat, t: f64) -> f64 {
        let d = self.dim * self.dim;
        let first = &self.emission - &self.absorption;
        let second = (&self.emission + &self.absorption) * real(0.5);
        let mut block = CMat::zeros(3 * d, 3 * d);
        for k in 0..3 {
            block.view_mut((k * d, k * d), (d, d)).copy_from(&self.generator);
        }
        block.view_mut((0, d), (d, d)).copy_from(&first);
        block.view_mut((d, 2 * d), (d, d)).copy_from(&first);
        block.view_mut((0, 2 * d), (d, d)).copy_from(&second);
        let e = (block * real(t)).exp();
        let v = Self::vec(rho);
        let tr = self.trace_row();
        let mean = (&tr * e.view((0, d), (d, d)) * &v)[0].re;
        let half_moment = (&tr * e.view((0, 2 * d), (d, d)) * &v)[0].re;
        2.0 * half_moment - mean * mean
    }

    /// Variance of `integral_0^t O(s) ds` for the quadratic observable with
    /// one-body matrix `O` in the stationary state `rho`, from the
    /// symmetrized two-time correlator.
    pub fn integrated_variance(&self, rho: &CMat, one_body: &CMat, t: f64) -> f64 {
        let d = self.dim * self.dim;
        let mut block = CMat::zeros(3 * d, 3 * d);
        block.view_mut((0, 0), (d, d)).copy_from(&self.generator);
        block.view_mut((0, d), (d, d)).fill_with_identity();
        block.view_mut((d, 2 * d), (d, d)).fill_with_identity();
        let e = (block * real(t)).exp();
        let op = self.quadratic(one_body);
        let mean = (&op * rho).trace().re;
        let kernel = self.unvec(&(e.view((0, 2 * d), (d, d)) * Self::vec(&(&op * rho))));
        2.0 * (&op * kernel).trace().re - mean * mean * t * t
    }
}
