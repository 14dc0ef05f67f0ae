use serde::{Deserialize, Serialize};

use crate::error::{check_rho, invalid, Error, Result};
use crate::measures::{
    Atom, DiscreteDistribution, Distribution, Interval, ProductDistribution, Region,
};

/// Tensor grid of boxes. Each axis stores only its finite inner breakpoints;
/// the outer intervals extend to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPartition {
    breakpoints: Vec<Vec<f64>>,
}

impl BoxPartition {
    pub fn new(breakpoints: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(invalid("partition needs at least one axis"));
        }
        for (m, b) in breakpoints.iter().enumerate() {
            if b.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("axis {m}: inner breakpoints must be finite")));
            }
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!("axis {m}: breakpoints not strictly increasing")));
            }
        }
        Ok(BoxPartition { breakpoints })
    }

    /// A single cell covering the whole space.
    pub fn trivial(dim: usize) -> Self {
        BoxPartition {
            breakpoints: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[Vec<f64>] {
        &self.breakpoints
    }

    pub fn counts(&self) -> Vec<usize> {
        self.breakpoints.iter().map(|b| b.len() + 1).collect()
    }

    pub fn n_cells(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn axis_interval(&self, m: usize, i: usize) -> Interval {
        let b = &self.breakpoints[m];
        let lo = if i == 0 { f64::NEG_INFINITY } else { b[i - 1] };
        let hi = if i == b.len() { f64::INFINITY } else { b[i] };
        Interval { lo, hi }
    }

    /// Mixed-radix decomposition of a cell index, last axis fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let counts = self.counts();
        let mut out = vec![0; counts.len()];
        for m in (0..counts.len()).rev() {
            out[m] = idx % counts[m];
            idx /= counts[m];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        self.counts()
            .iter()
            .zip(multi)
            .fold(0, |acc, (&n, &i)| acc * n + i)
    }

    pub fn cell(&self, idx: usize) -> Region {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(m, &i)| self.axis_interval(m, i))
            .collect()
    }

    /// Cell containing x; ties on a breakpoint go to the upper cell.
    pub fn locate(&self, x: &[f64]) -> usize {
        let multi: Vec<usize> = self
            .breakpoints
            .iter()
            .zip(x)
            .map(|(b, &v)| b.partition_point(|&t| t <= v))
            .collect();
        self.flat_index(&multi)
    }
}

/// Partition plus one location per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuantizerJson", into = "QuantizerJson")]
pub struct QuantizationOperator {
    partition: BoxPartition,
    locations: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct QuantizerJson {
    breakpoints: Vec<Vec<f64>>,
    locations: Vec<Vec<f64>>,
}

impl TryFrom<QuantizerJson> for QuantizationOperator {
    type Error = Error;
    fn try_from(j: QuantizerJson) -> Result<Self> {
        QuantizationOperator::new(BoxPartition::new(j.breakpoints)?, j.locations)
    }
}

impl From<QuantizationOperator> for QuantizerJson {
    fn from(q: QuantizationOperator) -> Self {
        QuantizerJson {
            breakpoints: q.partition.breakpoints,
            locations: q.locations,
        }
    }
}

/// One quantization cell with the quantities the bounds need.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub loc: Vec<f64>,
    /// Probability mass of the cell.
    pub prob: f64,
    /// Integral of ||x - loc||^rho over the cell.
    pub moment: f64,
    /// Box known to contain the cell's mass.
    pub region: Region,
}

/// Output of quantizing a measure: cells in a fixed order plus the order rho.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantization {
    pub cells: Vec<Cell>,
    pub rho: u32,
}

impl Quantization {
    pub fn theta_d(&self) -> f64 {
        let s: f64 = self.cells.iter().map(|c| c.moment).sum();
        s.powf(1.0 / self.rho as f64)
    }

    pub fn dim(&self) -> usize {
        self.cells[0].loc.len()
    }

    /// Discrete measure on the cell locations, zero-mass cells dropped.
    pub fn to_discrete(&self) -> DiscreteDistribution {
        let atoms = self
            .cells
            .iter()
            .filter(|c| c.prob > 0.0)
            .map(|c| Atom {
                loc: c.loc.clone(),
                w: c.prob,
            })
            .collect();
        DiscreteDistribution::from_weighted(atoms).expect("quantization carries mass")
    }

    pub fn without_empty(mut self) -> Self {
        self.cells.retain(|c| c.prob > 0.0);
        self
    }
}

impl QuantizationOperator {
    pub fn new(partition: BoxPartition, locations: Vec<Vec<f64>>) -> Result<Self> {
        let n = partition.n_cells();
        if locations.len() != n {
            return Err(invalid(format!("{} locations for {n} cells", locations.len())));
        }
        let d = partition.dim();
        if let Some(bad) = locations.iter().find(|l| l.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        if locations.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("locations must be finite"));
        }
        Ok(QuantizationOperator {
            partition,
            locations,
        })
    }

    /// Tensor operator whose locations are the products of per-axis locations.
    pub fn tensor(breakpoints: Vec<Vec<f64>>, axis_locations: &[Vec<f64>]) -> Result<Self> {
        let partition = BoxPartition::new(breakpoints)?;
        if axis_locations.len() != partition.dim() {
            return Err(Error::DimensionMismatch {
                expected: partition.dim(),
                got: axis_locations.len(),
            });
        }
        for (m, (locs, n)) in axis_locations.iter().zip(partition.counts()).enumerate() {
            if locs.len() != n {
                return Err(invalid(format!("axis {m}: {} locations for {n} intervals", locs.len())));
            }
        }
        let locations = (0..partition.n_cells())
            .map(|k| {
                partition
                    .multi_index(k)
                    .iter()
                    .enumerate()
                    .map(|(m, &i)| axis_locations[m][i])
                    .collect()
            })
            .collect();
        Self::new(partition, locations)
    }

    pub fn single(loc: Vec<f64>) -> Self {
        QuantizationOperator {
            partition: BoxPartition::trivial(loc.len()),
            locations: vec![loc],
        }
    }

    pub fn partition(&self) -> &BoxPartition {
        &self.partition
    }

    pub fn locations(&self) -> &[Vec<f64>] {
        &self.locations
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Delta(x): the location of the cell containing x.
    pub fn map_point(&self, x: &[f64]) -> &[f64] {
        &self.locations[self.partition.locate(x)]
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: d,
            });
        }
        Ok(())
    }

    /// Per-cell mass and constrained moment, using the per-axis product
    /// decomposition for product measures and direct summation for atoms.
    pub fn cells(&self, p: &Distribution, rho: u32) -> Result<Quantization> {
        check_rho(rho)?;
        self.check_dim(p.dim())?;
        let cells = match p {
            Distribution::Product(p) => self.product_cells(p, rho),
            Distribution::Discrete(p) => self.discrete_cells(p, rho),
        };
        Ok(Quantization { cells, rho })
    }

    fn product_cells(&self, p: &ProductDistribution, rho: u32) -> Vec<Cell> {
        let d = self.dim();
        let counts = self.partition.counts();
        let axis_prob: Vec<Vec<f64>> = (0..d)
            .map(|m| {
                (0..counts[m])
                    .map(|i| p.components()[m].prob(&self.partition.axis_interval(m, i)))
                    .collect()
            })
            .collect();
        (0..self.len())
            .map(|k| {
                let multi = self.partition.multi_index(k);
                let region: Region = (0..d)
                    .map(|m| self.partition.axis_interval(m, multi[m]))
                    .collect();
                let probs: Vec<f64> = (0..d).map(|m| axis_prob[m][multi[m]]).collect();
                let prob: f64 = probs.iter().product();
                let loc = &self.locations[k];
                let mut moment = 0.0;
                if prob > 0.0 {
                    for m in 0..d {
                        let others: f64 = (0..d).filter(|&j| j != m).map(|j| probs[j]).product();
                        if others > 0.0 {
                            moment += others
                                * p.components()[m].truncated_moment_unchecked(
                                    &region[m], loc[m], rho,
                                );
                        }
                    }
                }
                Cell {
                    loc: loc.clone(),
                    prob,
                    moment,
                    region: clip_region(region, p),
                }
            })
            .collect()
    }

    fn discrete_cells(&self, p: &DiscreteDistribution, rho: u32) -> Vec<Cell> {
        let d = self.dim();
        let mut prob = vec![0.0; self.len()];
        let mut moment = vec![0.0; self.len()];
        let mut lo = vec![vec![f64::INFINITY; d]; self.len()];
        let mut hi = vec![vec![f64::NEG_INFINITY; d]; self.len()];
        for a in p.atoms() {
            let k = self.partition.locate(&a.loc);
            prob[k] += a.w;
            moment[k] += a.w * dist_pow(&a.loc, &self.locations[k], rho);
            for m in 0..d {
                lo[k][m] = lo[k][m].min(a.loc[m]);
                hi[k][m] = hi[k][m].max(a.loc[m]);
            }
        }
        (0..self.len())
            .map(|k| {
                let region = if prob[k] > 0.0 {
                    (0..d)
                        .map(|m| Interval {
                            lo: lo[k][m].min(self.locations[k][m]),
                            hi: hi[k][m].max(self.locations[k][m]),
                        })
                        .collect()
                } else {
                    self.partition.cell(k)
                };
                Cell {
                    loc: self.locations[k].clone(),
                    prob: prob[k],
                    moment: moment[k],
                    region,
                }
            })
            .collect()
    }

    /// Pushforward of p under the operator.
    pub fn apply(&self, p: &Distribution) -> Result<DiscreteDistribution> {
        Ok(self.cells(p, 2)?.to_discrete())
    }

    pub fn theta_d(&self, p: &Distribution, rho: u32) -> Result<f64> {
        Ok(self.cells(p, rho)?.theta_d())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("quantizer serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Intersects a cell with the support of bounded components.
fn clip_region(mut region: Region, p: &ProductDistribution) -> Region {
    for (iv, c) in region.iter_mut().zip(p.components()) {
        if let Some(r) = iv.intersect(&c.support()) {
            *iv = r;
        }
    }
    region
}

/// ||x - y||_rho^rho
pub fn dist_pow(x: &[f64], y: &[f64], rho: u32) -> f64 {
    match rho {
        1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        _ => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum(),
    }
}

pub fn dist(x: &[f64], y: &[f64], rho: u32) -> f64 {
    let s = dist_pow(x, y, rho);
    if rho == 1 {
        s
    } else {
        s.sqrt()
    }
}
