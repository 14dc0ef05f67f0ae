use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::lloyd::{lloyd_quantizer_1d, Lloyd1d, DEFAULT_MAX_ITER, DEFAULT_TOL};
use super::partition::{BoxPartition, QuantizationOperator};
use crate::error::{check_rho, invalid, Result};
use crate::measures::{Component, Interval, ProductDistribution};

/// Lloyd quantizers of the standardized components, shared across calls.
/// Gaussian(m, s) and Uniform(a, b) are affine images of N(0,1) and U(0,1),
/// and Lloyd iterations commute with that map.
fn standard_lloyd(kind: u8, n: usize) -> Lloyd1d {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), Lloyd1d>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(q) = cache.lock().expect("lloyd cache").get(&(kind, n)) {
        return q.clone();
    }
    let comp = if kind == 0 {
        Component::Gaussian { mean: 0.0, std: 1.0 }
    } else {
        Component::Uniform { lo: 0.0, hi: 1.0 }
    };
    let q = lloyd_quantizer_1d(&comp, n, DEFAULT_TOL, DEFAULT_MAX_ITER);
    cache.lock().expect("lloyd cache").insert((kind, n), q.clone());
    q
}

/// Default Lloyd quantizer of a component with n levels.
pub fn component_lloyd(comp: &Component, n: usize) -> Lloyd1d {
    let (kind, shift, scale) = match *comp {
        Component::Gaussian { mean, std } => (0, mean, std),
        Component::Uniform { lo, hi } => (1, lo, hi - lo),
    };
    let q = standard_lloyd(kind, n);
    Lloyd1d {
        breakpoints: q.breakpoints.iter().map(|b| shift + scale * b).collect(),
        locations: q.locations.iter().map(|c| shift + scale * c).collect(),
        theta_d: scale * q.theta_d,
        iterations: q.iterations,
    }
}

/// Per-axis level counts from greedy refinement: start at one level per axis and
/// repeatedly add a level to the axis with the largest drop in squared error,
/// among axes whose increment keeps the product within budget.
pub fn greedy_allocation(p: &ProductDistribution, budget: usize) -> Vec<usize> {
    let d = p.dim();
    let budget = budget.max(1);
    if d == 1 {
        return vec![budget];
    }
    let mut counts = vec![1usize; d];
    let mse = |m: usize, n: usize| component_lloyd(&p.components()[m], n).theta_d.powi(2);
    let mut current: Vec<f64> = (0..d).map(|m| mse(m, 1)).collect();
    let mut next: Vec<f64> = (0..d).map(|m| mse(m, 2)).collect();
    loop {
        let total: usize = counts.iter().product();
        let mut best: Option<(usize, f64)> = None;
        for m in 0..d {
            if total / counts[m] * (counts[m] + 1) > budget {
                continue;
            }
            let gain = current[m] - next[m];
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((m, gain));
            }
        }
        let Some((m, _)) = best else { break };
        counts[m] += 1;
        current[m] = next[m];
        next[m] = mse(m, counts[m] + 1);
    }
    counts
}

/// Tensor grid of per-axis Lloyd quantizers with greedy budget allocation.
pub fn optimized_grid(p: &ProductDistribution, budget: usize) -> QuantizationOperator {
    let counts = greedy_allocation(p, budget);
    grid_with_counts(p, &counts)
}

pub fn grid_with_counts(p: &ProductDistribution, counts: &[usize]) -> QuantizationOperator {
    let axes: Vec<Lloyd1d> = p
        .components()
        .iter()
        .zip(counts)
        .map(|(c, &n)| component_lloyd(c, n))
        .collect();
    let breakpoints = axes.iter().map(|a| a.breakpoints.clone()).collect();
    let locations: Vec<Vec<f64>> = axes.iter().map(|a| a.locations.clone()).collect();
    QuantizationOperator::tensor(breakpoints, &locations).expect("lloyd output is a valid grid")
}

/// Largest k with k^d <= budget (at least 1).
pub fn per_axis_count(budget: usize, d: usize) -> usize {
    let mut k = (budget.max(1) as f64).powf(1.0 / d.max(1) as f64).round() as usize;
    while k > 1 && k.checked_pow(d as u32).is_none_or(|v| v > budget) {
        k -= 1;
    }
    while (k + 1).checked_pow(d as u32).is_some_and(|v| v <= budget) {
        k += 1;
    }
    k.max(1)
}

/// Uniform grid with the same number of locations on every axis, spread
/// evenly between the extreme Lloyd locations, with midpoint boundaries
/// (the nearest-location partition).
pub fn uniform_spacing_grid(p: &ProductDistribution, budget: usize) -> QuantizationOperator {
    let counts = vec![per_axis_count(budget, p.dim()); p.dim()];
    let axes: Vec<Vec<f64>> = p
        .components()
        .iter()
        .zip(&counts)
        .map(|(c, &n)| {
            let opt = component_lloyd(c, n).locations;
            if n == 1 {
                return opt;
            }
            let (lo, hi) = (opt[0], opt[n - 1]);
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        })
        .collect();
    let breakpoints = axes
        .iter()
        .map(|l| l.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
        .collect();
    QuantizationOperator::tensor(breakpoints, &axes).expect("evenly spaced grid is valid")
}

/// Result of the compact-cube construction.
#[derive(Debug, Clone)]
pub struct UniformGrid {
    pub operator: QuantizationOperator,
    /// Half side of the cube around the mean.
    pub half_side: f64,
    /// Cubes per axis inside the cube.
    pub per_axis: usize,
    /// Tail moment outside the cube.
    pub tail_moment: f64,
}

/// Integral of ||x - center||^rho outside the cube of half side h.
pub fn cube_tail_moment(p: &ProductDistribution, center: &[f64], h: f64, rho: u32) -> f64 {
    let d = p.dim();
    let inside: Vec<Interval> = center
        .iter()
        .map(|&c| Interval { lo: c - h, hi: c + h })
        .collect();
    let p_out: Vec<f64> = p
        .components()
        .iter()
        .zip(&inside)
        .map(|(c, iv)| {
            let below = c.prob(&Interval { lo: f64::NEG_INFINITY, hi: iv.lo });
            let above = c.prob(&Interval { lo: iv.hi, hi: f64::INFINITY });
            (below + above).min(1.0)
        })
        .collect();
    let mut total = 0.0;
    for m in 0..d {
        let comp = &p.components()[m];
        let c = center[m];
        let m_out = comp.truncated_moment_unchecked(&Interval { lo: f64::NEG_INFINITY, hi: c - h }, c, rho)
            + comp.truncated_moment_unchecked(&Interval { lo: c + h, hi: f64::INFINITY }, c, rho);
        let m_in = comp.truncated_moment_unchecked(&inside[m], c, rho);
        // 1 - prod_{j != m} (1 - q_j), computed without cancellation
        let log_in: f64 = (0..d).filter(|&j| j != m).map(|j| (-p_out[j]).ln_1p()).sum();
        let others_out = -log_in.exp_m1();
        total += m_out + m_in * others_out;
    }
    total
}

/// Uniform cube grid that certifies lipschitz * theta_d <= epsilon.
pub fn uniform_grid(
    p: &ProductDistribution,
    epsilon: f64,
    lipschitz: f64,
    rho: u32,
) -> Result<UniformGrid> {
    check_rho(rho)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid("epsilon must be positive and finite"));
    }
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(invalid("lipschitz constant must be positive and finite"));
    }
    let d = p.dim();
    let center = p.mean();
    let r = rho as f64;
    let target = epsilon.powf(r) / (2.0 * lipschitz.powf(r));
    let tail = |h: f64| cube_tail_moment(p, &center, h, rho);

    let half_side = if tail(0.0) <= target {
        0.0
    } else {
        let scale = p
            .variances()
            .iter()
            .fold(0.0f64, |a, v| a.max(v.sqrt()));
        let mut hi = scale;
        while tail(hi) > target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi.max(1e-300) {
                break;
            }
        }
        hi
    };

    let per_axis = if half_side == 0.0 {
        1
    } else {
        let n = 2f64.powf(1.0 / r) * lipschitz * (d as f64).powf(1.0 / r) * half_side / epsilon;
        (n.ceil() as usize).max(1)
    };

    if half_side == 0.0 {
        let tail_moment = tail(0.0);
        return Ok(UniformGrid {
            operator: QuantizationOperator::single(center),
            half_side,
            per_axis,
            tail_moment,
        });
    }

    let side = 2.0 * half_side / per_axis as f64;
    let breakpoints: Vec<Vec<f64>> = center
        .iter()
        .map(|&c| (0..=per_axis).map(|i| c - half_side + side * i as f64).collect())
        .collect();
    let partition = BoxPartition::new(breakpoints)?;
    let locations = (0..partition.n_cells())
        .map(|k| {
            let multi = partition.multi_index(k);
            if multi.iter().any(|&i| i == 0 || i == per_axis + 1) {
                center.clone()
            } else {
                multi
                    .iter()
                    .zip(&center)
                    .map(|(&i, &c)| c - half_side + side * (i as f64 - 0.5))
                    .collect()
            }
        })
        .collect();
    Ok(UniformGrid {
        operator: QuantizationOperator::new(partition, locations)?,
        half_side,
        per_axis,
        tail_moment: tail(half_side),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Distribution;

    fn gauss(mean: &[f64], var: &[f64]) -> ProductDistribution {
        ProductDistribution::diag_gaussian(mean, var).unwrap()
    }

    #[test]
    fn budget_one_is_mean() {
        let p = gauss(&[1.0, -2.0], &[0.5, 3.0]);
        let q = optimized_grid(&p, 1);
        assert_eq!(q.locations(), &[vec![1.0, -2.0]]);
    }

    #[test]
    fn refinement_goes_to_wide_axis() {
        // variances 1 and 1e-4 (std 0.01)
        let p = gauss(&[0.0, 0.0], &[1.0, 1e-4]);
        assert_eq!(greedy_allocation(&p, 8), vec![8, 1]);
    }

    #[test]
    fn per_axis_counts() {
        assert_eq!(per_axis_count(1000, 3), 10);
        assert_eq!(per_axis_count(999, 3), 9);
        assert_eq!(per_axis_count(10, 4), 1);
        assert_eq!(per_axis_count(16, 4), 2);
        assert_eq!(per_axis_count(7, 1), 7);
        assert_eq!(per_axis_count(0, 2), 1);
    }

    #[test]
    fn uniform_spacing_is_even_and_isotropic() {
        let p = gauss(&[0.0, 5.0], &[1.0, 1e-4]);
        let q = uniform_spacing_grid(&p, 30);
        assert_eq!(q.partition().counts(), vec![5, 5]);
        let xs: Vec<f64> = q.locations().iter().filter(|l| l[1] == q.locations()[0][1]).map(|l| l[0]).collect();
        let step = xs[1] - xs[0];
        for w in xs.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_cache_matches_direct() {
        let c = Component::gaussian(0.7, 2.5).unwrap();
        let direct = lloyd_quantizer_1d(&c, 7, DEFAULT_TOL, DEFAULT_MAX_ITER);
        let cached = component_lloyd(&c, 7);
        for (a, b) in direct.locations.iter().zip(&cached.locations) {
            assert!((a - b).abs() < 1e-3);
        }
        assert!((direct.theta_d - cached.theta_d).abs() < 1e-8);
    }

    #[test]
    fn cube_count_formula_example() {
        // rho = 2, d = 1, L = 1, half side 4, eps = 1 -> ceil(sqrt(2) * 4) = 6
        let n = (2f64.sqrt() * 1.0 * 1.0 * 4.0 / 1.0_f64).ceil() as usize;
        assert_eq!(n, 6);
    }

    #[test]
    fn uniform_grid_certifies() {
        let p = gauss(&[0.3, -1.0], &[0.5, 0.2]);
        for &(eps, l) in &[(0.5, 1.0), (0.2, 0.5), (0.3, 2.0)] {
            let g = uniform_grid(&p, eps, l, 2).unwrap();
            let t = g.operator.theta_d(&Distribution::Product(p.clone()), 2).unwrap();
            assert!(l * t <= eps, "eps={eps} l={l} theta={t}");
        }
    }

    #[test]
    fn uniform_grid_huge_epsilon_is_single_cell() {
        let p = gauss(&[0.0, 0.0], &[1.0, 1.0]);
        let g = uniform_grid(&p, 10.0, 1.0, 2).unwrap();
        assert_eq!(g.operator.len(), 1);
    }

    #[test]
    fn uniform_grid_scales_with_lipschitz() {
        let p = gauss(&[0.0], &[1.0]);
        let a = uniform_grid(&p, 0.1, 1.0, 2).unwrap();
        let b = uniform_grid(&p, 0.1, 2.0, 2).unwrap();
        assert!(b.per_axis >= 2 * a.per_axis - 1);
        assert!(b.half_side >= a.half_side);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let p = gauss(&[0.0], &[1.0]);
        assert!(uniform_grid(&p, 0.0, 1.0, 2).is_err());
    }
}
