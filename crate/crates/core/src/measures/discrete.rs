use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub loc: Vec<f64>,
    pub w: f64,
}

/// Finitely supported probability measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    /// Weights must already sum to one (within 1e-9); they are renormalized exactly.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let total = Self::check(&atoms)?;
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self::normalized(atoms, total))
    }

    /// Accepts any nonnegative weights with positive total and rescales them.
    pub fn from_weighted(atoms: Vec<Atom>) -> Result<Self> {
        let total = Self::check(&atoms)?;
        if !(total > 0.0) {
            return Err(invalid("total weight must be positive"));
        }
        Ok(Self::normalized(atoms, total))
    }

    pub fn dirac(loc: Vec<f64>) -> Self {
        DiscreteDistribution {
            atoms: vec![Atom { loc, w: 1.0 }],
        }
    }

    /// Equal-weight empirical measure of a point cloud.
    pub fn empirical(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len() as f64;
        Self::from_weighted(points.into_iter().map(|loc| Atom { loc, w: 1.0 / n }).collect())
    }

    fn check(atoms: &[Atom]) -> Result<f64> {
        let d = atoms
            .first()
            .ok_or_else(|| invalid("discrete distribution needs at least one atom"))?
            .loc
            .len();
        let mut total = 0.0;
        for a in atoms {
            if a.loc.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: a.loc.len(),
                });
            }
            if !(a.w >= 0.0) || !a.w.is_finite() {
                return Err(invalid(format!("bad weight {}", a.w)));
            }
            if a.loc.iter().any(|v| !v.is_finite()) {
                return Err(invalid("atom location must be finite"));
            }
            total += a.w;
        }
        Ok(total)
    }

    fn normalized(atoms: Vec<Atom>, total: f64) -> Self {
        let atoms = atoms
            .into_iter()
            .filter(|a| a.w > 0.0)
            .map(|a| Atom { w: a.w / total, ..a })
            .collect();
        DiscreteDistribution { atoms }
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].loc.len()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.w).collect()
    }

    pub fn locations(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(|a| a.loc.clone()).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for a in &self.atoms {
            for (mi, x) in m.iter_mut().zip(&a.loc) {
                *mi += a.w * x;
            }
        }
        m
    }

    pub fn region_probability(&self, cell: &[Interval]) -> Result<f64> {
        if cell.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: cell.len(),
            });
        }
        Ok(self
            .atoms
            .iter()
            .filter(|a| super::region_contains(cell, &a.loc))
            .map(|a| a.w)
            .sum())
    }

    /// Merges atoms at bit-identical locations.
    pub fn merge_duplicates(&self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| {
            a.loc
                .iter()
                .zip(&b.loc)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match out.last_mut() {
                Some(last) if last.loc == a.loc => last.w += a.w,
                _ => out.push(a),
            }
        }
        DiscreteDistribution { atoms: out }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cum = Vec::with_capacity(self.atoms.len());
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.w;
            cum.push(acc);
        }
        (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                let i = cum.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
                self.atoms[i].loc.clone()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atom_samples() {
        let d = DiscreteDistribution::dirac(vec![5.0]);
        assert_eq!(d.sample(3, 1), vec![vec![5.0]; 3]);
    }

    #[test]
    fn rejects_unnormalized() {
        let atoms = vec![Atom { loc: vec![0.0], w: 0.7 }];
        assert!(DiscreteDistribution::new(atoms.clone()).is_err());
        assert!(DiscreteDistribution::from_weighted(atoms).is_ok());
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let atoms = vec![
            Atom { loc: vec![0.0], w: 0.5 },
            Atom { loc: vec![0.0, 1.0], w: 0.5 },
        ];
        assert!(DiscreteDistribution::new(atoms).is_err());
    }

    #[test]
    fn sampling_frequencies() {
        let d = DiscreteDistribution::new(vec![
            Atom { loc: vec![0.0], w: 0.25 },
            Atom { loc: vec![1.0], w: 0.75 },
        ])
        .unwrap();
        let s = d.sample(20_000, 4);
        let ones = s.iter().filter(|x| x[0] == 1.0).count() as f64 / 20_000.0;
        assert!((ones - 0.75).abs() < 0.02);
    }

    #[test]
    fn merge() {
        let d = DiscreteDistribution::new(vec![
            Atom { loc: vec![1.0], w: 0.25 },
            Atom { loc: vec![0.0], w: 0.5 },
            Atom { loc: vec![1.0], w: 0.25 },
        ])
        .unwrap()
        .merge_duplicates();
        assert_eq!(d.len(), 2);
        assert_eq!(d.atoms()[1].w, 0.5);
    }
}
