use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::rng_from_seed;

/// On-site potential: i.i.d. standard normal values, reproducible from
/// `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderField {
    values: Vec<f64>,
    seed: u64,
}

impl DisorderField {
    pub fn gaussian(len: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let values = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        Self { values, seed }
    }

    /// Wraps explicit values; `seed` is recorded as provenance only.
    pub fn from_values(values: Vec<f64>, seed: u64) -> Self {
        Self { values, seed }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
            seed: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same field with every value shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + c).collect(),
            seed: self.seed,
        }
    }
}
