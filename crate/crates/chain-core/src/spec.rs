use serde::{Deserialize, Serialize};

use crate::ChainError;

/// Coupling rates to the left and right reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRates {
    pub left: f64,
    pub right: f64,
}

impl BoundaryRates {
    pub fn symmetric(rate: f64) -> Self {
        Self { left: rate, right: rate }
    }

    pub fn is_symmetric(&self) -> bool {
        self.left == self.right
    }
}

/// Fermi occupations of the two reservoirs at the transport window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupations {
    pub left: f64,
    pub right: f64,
}

impl Occupations {
    /// Left reservoir full, right reservoir empty.
    pub const FULL_BIAS: Occupations = Occupations { left: 1.0, right: 0.0 };

    /// Symmetric bias with entropy `sigma` produced per tick: `f_L = 1/(1+e^-sigma)`, `f_R = 1-f_L`.
    pub fn from_entropy(sigma: f64) -> Result<Self, ChainError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(ChainError::BadEntropy(sigma));
        }
        let left = 1.0 / (1.0 + (-sigma).exp());
        Ok(Self { left, right: 1.0 - left })
    }

    /// Inverse of [`Occupations::from_entropy`] when `f_L + f_R = 1`.
    pub fn entropy(&self) -> Option<f64> {
        if (self.left + self.right - 1.0).abs() > 1e-12 || self.right <= 0.0 {
            return if self.right == 0.0 && self.left == 1.0 { Some(f64::INFINITY) } else { None };
        }
        Some((self.left / self.right).ln())
    }

    pub fn is_full_bias(&self) -> bool {
        self.left == 1.0 && self.right == 0.0
    }
}

/// A validated chain instance: `n_sites` sites, `n_sites - 1` nearest-neighbour couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainDocument", into = "ChainDocument")]
pub struct ChainSpec {
    couplings: Vec<f64>,
    rates: BoundaryRates,
    occupations: Occupations,
    entropy: Option<f64>,
    seed: Option<u64>,
}

impl ChainSpec {
    /// Full-bias chain with unit boundary rate.
    pub fn new(couplings: Vec<f64>) -> Result<Self, ChainError> {
        Self::with_all(couplings, BoundaryRates::symmetric(1.0), Occupations::FULL_BIAS)
    }

    /// Uniform chain of `n_sites` sites, every coupling equal to `g`.
    pub fn uniform(n_sites: usize, g: f64) -> Result<Self, ChainError> {
        if n_sites == 0 {
            return Err(ChainError::NoSites);
        }
        Self::new(vec![g; n_sites - 1])
    }

    pub fn with_all(
        couplings: Vec<f64>,
        rates: BoundaryRates,
        occupations: Occupations,
    ) -> Result<Self, ChainError> {
        for (index, &value) in couplings.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ChainError::BadCoupling { index, value });
            }
        }
        for rate in [rates.left, rates.right] {
            if !rate.is_finite() || rate <= 0.0 {
                return Err(ChainError::BadRate(rate));
            }
        }
        for (side, value) in [("left", occupations.left), ("right", occupations.right)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ChainError::BadOccupation { side, value });
            }
        }
        Ok(Self { couplings, rates, occupations, entropy: None, seed: None })
    }

    pub fn with_rate(mut self, rate: f64) -> Result<Self, ChainError> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(ChainError::BadRate(rate));
        }
        self.rates = BoundaryRates::symmetric(rate);
        Ok(self)
    }

    /// Asymmetric boundary rates. Supported by the transport formulas but not
    /// covered by the validation suite.
    pub fn with_rates(mut self, rates: BoundaryRates) -> Result<Self, ChainError> {
        for rate in [rates.left, rates.right] {
            if !rate.is_finite() || rate <= 0.0 {
                return Err(ChainError::BadRate(rate));
            }
        }
        self.rates = rates;
        Ok(self)
    }

    pub fn with_occupations(mut self, occupations: Occupations) -> Result<Self, ChainError> {
        for (side, value) in [("left", occupations.left), ("right", occupations.right)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ChainError::BadOccupation { side, value });
            }
        }
        self.occupations = occupations;
        self.entropy = None;
        Ok(self)
    }

    pub fn with_entropy(mut self, sigma: f64) -> Result<Self, ChainError> {
        self.occupations = Occupations::from_entropy(sigma)?;
        self.entropy = Some(sigma);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_couplings(&self, couplings: Vec<f64>) -> Result<Self, ChainError> {
        if couplings.len() != self.couplings.len() {
            return Err(ChainError::CouplingCount { expected: self.couplings.len(), got: couplings.len() });
        }
        let mut out = Self::with_all(couplings, self.rates, self.occupations)?;
        out.entropy = self.entropy;
        out.seed = self.seed;
        Ok(out)
    }

    pub fn n_sites(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn rates(&self) -> BoundaryRates {
        self.rates
    }

    /// Symmetric boundary rate; for asymmetric chains the left rate.
    pub fn rate(&self) -> f64 {
        self.rates.left
    }

    pub fn occupations(&self) -> Occupations {
        self.occupations
    }

    pub fn entropy(&self) -> Option<f64> {
        self.entropy
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_coupling(&self) -> Option<f64> {
        self.couplings.iter().copied().reduce(f64::min)
    }
}

/// Flat serialized form of a [`ChainSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDocument {
    pub n_sites: usize,
    pub couplings: Vec<f64>,
    #[serde(default = "unit_rate")]
    pub boundary_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_rate_right: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occ_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occ_right: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn unit_rate() -> f64 {
    1.0
}

impl TryFrom<ChainDocument> for ChainSpec {
    type Error = ChainError;

    fn try_from(doc: ChainDocument) -> Result<Self, ChainError> {
        if doc.n_sites == 0 {
            return Err(ChainError::NoSites);
        }
        if doc.couplings.len() != doc.n_sites - 1 {
            return Err(ChainError::CouplingCount { expected: doc.n_sites - 1, got: doc.couplings.len() });
        }
        let rates = BoundaryRates {
            left: doc.boundary_rate,
            right: doc.boundary_rate_right.unwrap_or(doc.boundary_rate),
        };
        let spec = ChainSpec::with_all(doc.couplings, rates, Occupations::FULL_BIAS)?;
        let spec = match (doc.entropy, doc.occ_left, doc.occ_right) {
            (Some(sigma), left, right) => {
                let spec = spec.with_entropy(sigma)?;
                let occ = spec.occupations();
                let clash = |given: Option<f64>, derived: f64| given.is_some_and(|v| (v - derived).abs() > 1e-12);
                if clash(left, occ.left) || clash(right, occ.right) {
                    return Err(ChainError::ConflictingBias);
                }
                spec
            }
            (None, left, right) => spec.with_occupations(Occupations {
                left: left.unwrap_or(1.0),
                right: right.unwrap_or(0.0),
            })?,
        };
        Ok(spec.with_seed(doc.seed))
    }
}

impl From<ChainSpec> for ChainDocument {
    fn from(spec: ChainSpec) -> Self {
        let n_sites = spec.n_sites();
        ChainDocument {
            n_sites,
            couplings: spec.couplings,
            boundary_rate: spec.rates.left,
            boundary_rate_right: (!spec.rates.is_symmetric()).then_some(spec.rates.right),
            occ_left: Some(spec.occupations.left),
            occ_right: Some(spec.occupations.right),
            entropy: spec.entropy,
            seed: spec.seed,
        }
    }
}
