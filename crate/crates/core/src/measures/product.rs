use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Component, Interval};
use crate::error::{invalid, Error, Result};

/// Product of independent one-dimensional components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDistribution {
    components: Vec<Component>,
}

impl ProductDistribution {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("product distribution needs at least one component"));
        }
        for c in &components {
            c.validate()?;
        }
        Ok(ProductDistribution { components })
    }

    /// Diagonal Gaussian from means and variances.
    pub fn diag_gaussian(mean: &[f64], var: &[f64]) -> Result<Self> {
        if mean.len() != var.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: var.len(),
            });
        }
        let comps = mean
            .iter()
            .zip(var)
            .map(|(&m, &v)| Component::gaussian(m, v.sqrt()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn mean(&self) -> Vec<f64> {
        self.components.iter().map(Component::mean).collect()
    }

    pub fn variances(&self) -> Vec<f64> {
        self.components.iter().map(Component::variance).collect()
    }

    /// Concatenation of two independent products (e.g. state and noise).
    pub fn concat(&self, other: &ProductDistribution) -> ProductDistribution {
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        ProductDistribution { components }
    }

    pub fn region_probability(&self, cell: &[Interval]) -> Result<f64> {
        if cell.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: cell.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .zip(cell)
            .map(|(c, iv)| c.prob(iv))
            .product())
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }

    pub fn sample_with<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.components.iter().map(|c| c.sample(rng)).collect()
    }
}
