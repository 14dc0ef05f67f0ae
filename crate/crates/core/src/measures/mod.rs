//! Continuous product measures, discrete measures and the constrained moments
//! that make quantization errors computable in closed form.

mod component;
mod discrete;
mod interval;
mod product;

pub use component::{std_normal_cdf, std_normal_mass, std_normal_pdf, Component};
pub use discrete::{Atom, DiscreteDistribution};
pub use interval::{region_contains, Interval, Region};
pub use product::ProductDistribution;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Either kind of measure, tagged for JSON as `{"kind": "product" | "discrete", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Product(ProductDistribution),
    Discrete(DiscreteDistribution),
}

impl Distribution {
    pub fn dim(&self) -> usize {
        match self {
            Distribution::Product(p) => p.dim(),
            Distribution::Discrete(p) => p.dim(),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        match self {
            Distribution::Product(p) => p.sample(n, seed),
            Distribution::Discrete(p) => p.sample(n, seed),
        }
    }

    pub fn region_probability(&self, cell: &[Interval]) -> Result<f64> {
        match self {
            Distribution::Product(p) => p.region_probability(cell),
            Distribution::Discrete(p) => p.region_probability(cell),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            Distribution::Product(p) => p.mean(),
            Distribution::Discrete(p) => p.mean(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Distribution = serde_json::from_str(s)?;
        d.validated()
    }

    /// Re-runs constructor checks after deserialization.
    pub fn validated(self) -> Result<Self> {
        Ok(match self {
            Distribution::Product(p) => {
                Distribution::Product(ProductDistribution::new(p.components().to_vec())?)
            }
            Distribution::Discrete(p) => {
                Distribution::Discrete(DiscreteDistribution::new(p.atoms().to_vec())?)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }
}

impl From<ProductDistribution> for Distribution {
    fn from(p: ProductDistribution) -> Self {
        Distribution::Product(p)
    }
}

impl From<DiscreteDistribution> for Distribution {
    fn from(p: DiscreteDistribution) -> Self {
        Distribution::Discrete(p)
    }
}
