//! Core types for a tight-binding chain coupled to two fermionic reservoirs
//! at its ends.
//!
//! A [`ChainSpec`] fixes the couplings, boundary rates and reservoir
//! occupations. [`EffectiveHamiltonian`] is the non-Hermitian one-body matrix
//! built from it, optionally with on-site or coupling disorder drawn from a
//! reproducible per-sample RNG stream. The [`linalg`] and [`quad`] modules hold
//! numerical kernels shared by the downstream crates.

mod disorder;
mod error;
mod hamiltonian;
pub mod linalg;
pub mod quad;
mod rng;
mod spec;

pub use disorder::{CouplingDisorder, OnsiteDisorder};
pub use error::ChainError;
pub use hamiltonian::EffectiveHamiltonian;
pub use rng::{sample_stream, SampleRng};
pub use spec::{BoundaryRates, ChainDocument, ChainSpec, Occupations};

pub use num_complex::Complex64;

/// Dense complex matrix used throughout the workspace.
pub type CMat = nalgebra::DMatrix<Complex64>;
