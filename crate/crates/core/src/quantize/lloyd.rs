use crate::measures::{Component, Interval};

#[derive(Debug, Clone, PartialEq)]
pub struct Lloyd1d {
    /// Inner breakpoints (n - 1 of them).
    pub breakpoints: Vec<f64>,
    pub locations: Vec<f64>,
    /// Root mean squared quantization error.
    pub theta_d: f64,
    pub iterations: usize,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 500;

fn cells_of(breakpoints: &[f64], n: usize) -> impl Iterator<Item = Interval> + '_ {
    (0..n).map(move |i| Interval {
        lo: if i == 0 { f64::NEG_INFINITY } else { breakpoints[i - 1] },
        hi: if i == n - 1 { f64::INFINITY } else { breakpoints[i] },
    })
}

fn mse(comp: &Component, breakpoints: &[f64], locations: &[f64]) -> f64 {
    cells_of(breakpoints, locations.len())
        .zip(locations)
        .map(|(iv, &c)| comp.truncated_moment_unchecked(&iv, c, 2))
        .sum()
}

fn midpoints(locations: &[f64]) -> Vec<f64> {
    locations.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Lloyd-Max quantizer: alternate conditional means and midpoint boundaries,
/// starting from the quantiles at (k - 0.5) / n.
pub fn lloyd_quantizer_1d(comp: &Component, n: usize, tol: f64, max_iter: usize) -> Lloyd1d {
    let n = n.max(1);
    if n == 1 {
        let locations = vec![comp.mean()];
        return Lloyd1d {
            breakpoints: vec![],
            theta_d: comp.variance().sqrt(),
            locations,
            iterations: 0,
        };
    }
    let mut locations: Vec<f64> = (0..n)
        .map(|k| comp.quantile((k as f64 + 0.5) / n as f64))
        .collect();
    let mut breakpoints = midpoints(&locations);
    let mut theta = mse(comp, &breakpoints, &locations).sqrt();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let next: Vec<f64> = cells_of(&breakpoints, n)
            .map(|iv| comp.conditional_mean(&iv))
            .collect();
        // Keep strict ordering; a collapsed pair would make the breakpoints degenerate.
        if next.windows(2).any(|w| w[0] >= w[1]) {
            break;
        }
        let next_bp = midpoints(&next);
        let t = mse(comp, &next_bp, &next).sqrt();
        if t > theta {
            break;
        }
        let delta = theta - t;
        locations = next;
        breakpoints = next_bp;
        theta = t;
        if delta < tol {
            break;
        }
    }
    Lloyd1d {
        breakpoints,
        locations,
        theta_d: theta,
        iterations,
    }
}
