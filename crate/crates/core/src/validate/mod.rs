//! Independent oracles: exact discrete transport, Monte-Carlo Wasserstein
//! estimates, closed-form Gaussian W2 and adaptive quadrature.

mod quadrature;
mod simplex;

pub use quadrature::{quadrature_moment, QUAD_TOL};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_rho, invalid, Error, Result};
use crate::measures::{Component, DiscreteDistribution, Distribution, ProductDistribution};
use crate::quantize::dist_pow;

/// Combined atom count solved exactly.
pub const EXACT_CAP: usize = 4000;
/// Arc cap (samples x atoms) when a sample is transported to a fixed discrete law.
pub const SEMI_DISCRETE_ARC_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub mass: Vec<f64>,
    /// sum of mass * cost
    pub cost: f64,
}

impl TransportPlan {
    pub fn row_sums(&self, n: usize) -> Vec<f64> {
        let mut r = vec![0.0; n];
        for (&i, &m) in self.source.iter().zip(&self.mass) {
            r[i] += m;
        }
        r
    }

    pub fn col_sums(&self, n: usize) -> Vec<f64> {
        let mut r = vec![0.0; n];
        for (&j, &m) in self.target.iter().zip(&self.mass) {
            r[j] += m;
        }
        r
    }
}

/// Optimal plan for a cost matrix given row by row (a.len() x b.len()).
pub fn solve_transport(a: &[f64], b: &[f64], cost: &[f64]) -> Result<TransportPlan> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(invalid("transport needs two nonempty weight vectors"));
    }
    if cost.len() != n1 * n2 {
        return Err(Error::DimensionMismatch {
            expected: n1 * n2,
            got: cost.len(),
        });
    }
    if a.iter().chain(b).any(|w| !(*w >= 0.0)) || cost.iter().any(|c| !c.is_finite()) {
        return Err(invalid("transport needs nonnegative weights and finite costs"));
    }
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    if (sa - sb).abs() > 1e-9 * sa.max(sb) {
        return Err(invalid(format!("marginal masses differ: {sa} vs {sb}")));
    }
    // equalize totals exactly so the artificial arcs carry nothing
    let b: Vec<f64> = b.iter().map(|v| v * sa / sb).collect();
    let sol = simplex::solve(a, &b, cost, 100 * (n1 + n2) * (n1 + n2) + 1000)
        .ok_or_else(|| invalid("network simplex did not terminate"))?;
    let mut plan = TransportPlan {
        source: vec![],
        target: vec![],
        mass: vec![],
        cost: 0.0,
    };
    for (e, &f) in sol.flow.iter().enumerate() {
        if f > 0.0 {
            plan.source.push(e / n2);
            plan.target.push(e % n2);
            plan.mass.push(f);
            plan.cost += f * cost[e];
        }
    }
    Ok(plan)
}

fn check_size(a: usize, b: usize) -> Result<()> {
    if a + b > EXACT_CAP {
        return Err(Error::TooLarge {
            size: a + b,
            cap: EXACT_CAP,
        });
    }
    Ok(())
}

/// Exact W_rho between two discrete distributions with its optimal plan.
pub fn exact_wasserstein(a: &DiscreteDistribution, b: &DiscreteDistribution, rho: u32) -> Result<(f64, TransportPlan)> {
    check_rho(rho)?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    check_size(a.len(), b.len())?;
    let (xa, xb) = (a.atoms(), b.atoms());
    let cost: Vec<f64> = xa
        .iter()
        .flat_map(|p| xb.iter().map(move |q| dist_pow(&p.loc, &q.loc, rho)))
        .collect();
    let plan = solve_transport(&a.weights(), &b.weights(), &cost)?;
    let w = plan.cost.max(0.0).powf(1.0 / rho as f64);
    Ok((w, plan))
}

/// W_rho between equal-weight point clouds of the same size.
pub fn empirical_wasserstein(xs: &[Vec<f64>], ys: &[Vec<f64>], rho: u32) -> Result<f64> {
    check_rho(rho)?;
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(invalid("point clouds must be nonempty and of equal size"));
    }
    check_size(xs.len(), ys.len())?;
    let n = xs.len();
    let w = vec![1.0 / n as f64; n];
    let cost: Vec<f64> = xs.iter().flat_map(|p| ys.iter().map(move |q| dist_pow(p, q, rho))).collect();
    let plan = solve_transport(&w, &w, &cost)?;
    Ok(plan.cost.max(0.0).powf(1.0 / rho as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
    pub repeats: usize,
}

/// Mean and standard error over repeats of the empirical W_rho between n
/// draws from each sampler; sampler(n, seed) returns n points.
pub fn mc_wasserstein_with<P, Q>(p: P, q: Q, n: usize, repeats: usize, rho: u32, seed: u64) -> Result<McEstimate>
where
    P: Fn(usize, u64) -> Vec<Vec<f64>> + Sync,
    Q: Fn(usize, u64) -> Vec<Vec<f64>> + Sync,
{
    check_rho(rho)?;
    if n == 0 || repeats == 0 {
        return Err(invalid("need n >= 1 and repeats >= 1"));
    }
    check_size(n, n)?;
    let vals: Result<Vec<f64>> = (0..repeats as u64)
        .into_par_iter()
        .map(|r| {
            let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(2 * r);
            empirical_wasserstein(&p(n, s), &q(n, s + 1), rho)
        })
        .collect();
    Ok(summarize(&vals?, n))
}

pub fn mc_wasserstein(p: &Distribution, q: &Distribution, n: usize, repeats: usize, rho: u32, seed: u64) -> Result<McEstimate> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    mc_wasserstein_with(|k, s| p.sample(k, s), |k, s| q.sample(k, s), n, repeats, rho, seed)
}

/// Mean and standard error over repeats of the exact W_rho between n draws
/// of a sampler and a fixed discrete distribution.
pub fn mc_wasserstein_to_discrete<P>(
    p: P,
    q: &DiscreteDistribution,
    n: usize,
    repeats: usize,
    rho: u32,
    seed: u64,
) -> Result<McEstimate>
where
    P: Fn(usize, u64) -> Vec<Vec<f64>> + Sync,
{
    check_rho(rho)?;
    if n == 0 || repeats == 0 {
        return Err(invalid("need n >= 1 and repeats >= 1"));
    }
    if n.saturating_mul(q.len()) > SEMI_DISCRETE_ARC_CAP {
        return Err(Error::TooLarge {
            size: n.saturating_mul(q.len()),
            cap: SEMI_DISCRETE_ARC_CAP,
        });
    }
    let w = vec![1.0 / n as f64; n];
    let (qw, qa) = (q.weights(), q.atoms());
    let vals: Result<Vec<f64>> = (0..repeats as u64)
        .into_par_iter()
        .map(|r| {
            let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(2 * r);
            let xs = p(n, s);
            if xs.len() != n || xs.iter().any(|x| x.len() != q.dim()) {
                return Err(invalid("sampler returned the wrong shape"));
            }
            let cost: Vec<f64> = xs
                .iter()
                .flat_map(|x| qa.iter().map(move |a| dist_pow(x, &a.loc, rho)))
                .collect();
            let plan = solve_transport(&w, &qw, &cost)?;
            Ok(plan.cost.max(0.0).powf(1.0 / rho as f64))
        })
        .collect();
    Ok(summarize(&vals?, n))
}

fn summarize(vals: &[f64], n: usize) -> McEstimate {
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let stderr = if vals.len() > 1 {
        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt()
    } else {
        0.0
    };
    McEstimate {
        estimate: mean,
        stderr,
        n,
        repeats: vals.len(),
    }
}

/// Closed-form W2 between product Gaussians.
pub fn gaussian_w2(p: &ProductDistribution, q: &ProductDistribution) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let mut s = 0.0;
    for (a, b) in p.components().iter().zip(q.components()) {
        match (a, b) {
            (Component::Gaussian { mean: m1, std: s1 }, Component::Gaussian { mean: m2, std: s2 }) => {
                s += (m1 - m2).powi(2) + (s1 - s2).powi(2);
            }
            _ => return Err(invalid("gaussian_w2 needs Gaussian components")),
        }
    }
    Ok(s.sqrt())
}

#[cfg(test)]
mod tests;
