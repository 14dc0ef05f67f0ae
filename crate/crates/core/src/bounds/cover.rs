//! Global subpartitions used for type-(ii) coefficients.

use crate::measures::{Distribution, Interval, Region};
use crate::quantize::BoxPartition;

pub const DEFAULT_COVER_CAP: usize = 256;

/// Drops every other inner breakpoint of the axis with the most intervals
/// until the grid has at most `cap` cells.
pub fn coarsen(partition: &BoxPartition, cap: usize) -> BoxPartition {
    let mut bps: Vec<Vec<f64>> = partition.breakpoints().to_vec();
    let count = |b: &[Vec<f64>]| b.iter().map(|v| v.len() + 1).product::<usize>();
    while count(&bps) > cap.max(1) {
        let m = (0..bps.len()).max_by_key(|&m| (bps[m].len(), usize::MAX - m)).unwrap();
        if bps[m].is_empty() {
            break;
        }
        bps[m] = bps[m].iter().skip(1).step_by(2).cloned().collect();
    }
    BoxPartition::new(bps).expect("subsequence of increasing breakpoints")
}

/// Every cell of a box partition, shells included; together they cover R^d.
pub fn partition_cover(partition: &BoxPartition, cap: usize) -> Vec<Region> {
    let p = coarsen(partition, cap);
    (0..p.n_cells()).map(|i| p.cell(i)).collect()
}

fn weighted_quantiles(mut pts: Vec<(f64, f64)>, n: usize) -> Vec<f64> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pts.iter().map(|p| p.1).sum();
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut next = 1;
    for &(x, w) in &pts {
        acc += w;
        while next < n && acc >= total * next as f64 / n as f64 {
            if out.last().is_none_or(|&l| x > l) {
                out.push(x);
            }
            next += 1;
        }
    }
    // the last breakpoint would make an empty top shell
    if let (Some(&l), Some(&(xmax, _))) = (out.last(), pts.last()) {
        if l >= xmax {
            out.pop();
        }
    }
    out
}

/// Box grid with per-axis quantile breakpoints of `p` and unbounded shells.
pub fn quantile_cover(p: &Distribution, cap: usize) -> Vec<Region> {
    let d = p.dim();
    let per_axis = ((cap.max(1) as f64).powf(1.0 / d as f64) + 1e-9).floor().max(1.0) as usize;
    let bps: Vec<Vec<f64>> = (0..d)
        .map(|m| match p {
            Distribution::Product(q) => {
                let c = &q.components()[m];
                let mut v: Vec<f64> = (1..per_axis).map(|i| c.quantile(i as f64 / per_axis as f64)).collect();
                v.dedup_by(|a, b| a <= b);
                v
            }
            Distribution::Discrete(q) => {
                weighted_quantiles(q.atoms().iter().map(|a| (a.loc[m], a.w)).collect(), per_axis)
            }
        })
        .collect();
    let part = BoxPartition::new(bps).expect("strictly increasing quantiles");
    (0..part.n_cells()).map(|i| part.cell(i)).collect()
}

/// Cartesian products of two covers.
pub fn product_cover(a: &[Region], b: &[Region]) -> Vec<Region> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for ra in a {
        for rb in b {
            let mut r: Vec<Interval> = ra.clone();
            r.extend(rb.iter().cloned());
            out.push(r);
        }
    }
    out
}
