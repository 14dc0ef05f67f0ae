use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::partition::{dist_pow, Cell, Quantization};
use crate::error::{check_rho, Result};
use crate::measures::{Atom, DiscreteDistribution, Interval};

pub const RESTARTS: u64 = 10;
const MAX_ITER: usize = 100;

/// Weighted k-means clustering of a discrete measure.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub centers: Vec<Vec<f64>>,
    /// Cluster index per input atom.
    pub assignment: Vec<usize>,
    /// Weighted sum of squared distances to the assigned centers.
    pub cost: f64,
}

fn sq(x: &[f64], y: &[f64]) -> f64 {
    dist_pow(x, y, 2)
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = sq(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn pick<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return 0;
    }
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn kmeans_once(p: &DiscreteDistribution, k: usize, seed: u64, stream: u64) -> Clustering {
    let atoms = p.atoms();
    let n = atoms.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    // k-means++ seeding with mass-weighted probabilities
    let mut centers = vec![atoms[pick(&mut rng, &p.weights())].loc.clone()];
    let mut d2: Vec<f64> = atoms.iter().map(|a| sq(&a.loc, &centers[0])).collect();
    while centers.len() < k {
        let scores: Vec<f64> = atoms.iter().zip(&d2).map(|(a, d)| a.w * d).collect();
        if !(scores.iter().sum::<f64>() > 0.0) {
            break;
        }
        let c = atoms[pick(&mut rng, &scores)].loc.clone();
        for (di, a) in d2.iter_mut().zip(atoms) {
            *di = di.min(sq(&a.loc, &c));
        }
        centers.push(c);
    }

    let dim = p.dim();
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..MAX_ITER {
        let mut changed = false;
        for (i, a) in atoms.iter().enumerate() {
            let (j, _) = nearest(&a.loc, &centers);
            if assignment[i] != j {
                assignment[i] = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; centers.len()];
        let mut mass = vec![0.0; centers.len()];
        for (a, &j) in atoms.iter().zip(&assignment) {
            mass[j] += a.w;
            for (s, x) in sums[j].iter_mut().zip(&a.loc) {
                *s += a.w * x;
            }
        }
        for (j, c) in centers.iter_mut().enumerate() {
            if mass[j] > 0.0 {
                for (cm, s) in c.iter_mut().zip(&sums[j]) {
                    *cm = s / mass[j];
                }
            }
        }
    }
    compact(p, centers, assignment)
}

/// Drops empty clusters, recomputes centroids and the exact cost.
fn compact(p: &DiscreteDistribution, centers: Vec<Vec<f64>>, assignment: Vec<usize>) -> Clustering {
    let dim = p.dim();
    let mut mass = vec![0.0; centers.len()];
    let mut sums = vec![vec![0.0; dim]; centers.len()];
    for (a, &j) in p.atoms().iter().zip(&assignment) {
        mass[j] += a.w;
        for (s, x) in sums[j].iter_mut().zip(&a.loc) {
            *s += a.w * x;
        }
    }
    let mut remap = vec![usize::MAX; centers.len()];
    let mut out = Vec::new();
    for j in 0..centers.len() {
        if mass[j] > 0.0 {
            remap[j] = out.len();
            out.push(sums[j].iter().map(|s| s / mass[j]).collect::<Vec<f64>>());
        }
    }
    let assignment: Vec<usize> = assignment.iter().map(|&j| remap[j]).collect();
    let cost = p
        .atoms()
        .iter()
        .zip(&assignment)
        .map(|(a, &j)| a.w * sq(&a.loc, &out[j]))
        .sum();
    Clustering {
        centers: out,
        assignment,
        cost,
    }
}

/// Best of several seeded weighted k-means runs (lowest cost, ties to the
/// earliest restart).
pub fn kmeans(p: &DiscreteDistribution, k: usize, seed: u64) -> Clustering {
    let runs: Vec<Clustering> = (0..RESTARTS)
        .into_par_iter()
        .map(|r| kmeans_once(p, k, seed, r))
        .collect();
    runs.into_iter()
        .reduce(|best, c| if c.cost < best.cost { c } else { best })
        .expect("at least one restart")
}

fn identity_clustering(p: &DiscreteDistribution) -> Clustering {
    Clustering {
        centers: p.locations(),
        assignment: (0..p.len()).collect(),
        cost: 0.0,
    }
}

/// Clusters p to at most `budget` atoms. Returns the reduced measure and
/// theta_red, the exact root transport cost of the cluster assignment.
pub fn reduce_discrete(
    p: &DiscreteDistribution,
    budget: usize,
    seed: u64,
) -> (DiscreteDistribution, f64) {
    let budget = budget.max(1);
    if budget >= p.len() {
        return (p.clone(), 0.0);
    }
    let c = kmeans(p, budget, seed);
    let mut w = vec![0.0; c.centers.len()];
    for (a, &j) in p.atoms().iter().zip(&c.assignment) {
        w[j] += a.w;
    }
    let atoms = c
        .centers
        .into_iter()
        .zip(w)
        .map(|(loc, w)| Atom { loc, w })
        .collect();
    (
        DiscreteDistribution::from_weighted(atoms).expect("clusters carry mass"),
        c.cost.sqrt(),
    )
}

/// Clustering as quantization cells: mass, rho-moment and bounding box per cluster.
pub fn cluster_cells(p: &DiscreteDistribution, budget: usize, seed: u64, rho: u32) -> Result<Quantization> {
    check_rho(rho)?;
    let c = if budget.max(1) >= p.len() {
        identity_clustering(p)
    } else {
        kmeans(p, budget, seed)
    };
    let dim = p.dim();
    let mut cells: Vec<Cell> = c
        .centers
        .iter()
        .map(|loc| Cell {
            loc: loc.clone(),
            prob: 0.0,
            moment: 0.0,
            region: loc.iter().map(|&x| Interval::point(x)).collect(),
        })
        .collect();
    for (a, &j) in p.atoms().iter().zip(&c.assignment) {
        let cell = &mut cells[j];
        cell.prob += a.w;
        cell.moment += a.w * dist_pow(&a.loc, &cell.loc, rho);
        for m in 0..dim {
            cell.region[m] = cell.region[m].hull(&Interval::point(a.loc[m]));
        }
    }
    Ok(Quantization { cells, rho })
}
