//! Function models: a small DAG of primitives with evaluation, interval
//! bounds, linear enclosures and slope matrices.

mod builtin;
mod model;
mod scalar;

pub use builtin::*;
pub use model::{magnitude, FunctionModel, LinearEnclosure, ModelBuilder, Node, Op, SlopeMatrix};
pub use scalar::{sigmoid, Scalar};

use nalgebra::DMatrix;

use crate::error::{check_rho, Result};
use crate::measures::Interval;

fn to_dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(m, n, |i, j| rows[i][j])
}

/// Largest singular value by power iteration on A^T A.
pub fn spectral_norm_power(rows: &[Vec<f64>], rel_tol: f64, max_iter: usize) -> f64 {
    let a = to_dmatrix(rows);
    if a.is_empty() || a.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let ata = a.transpose() * &a;
    let n = ata.ncols();
    let mut v = nalgebra::DVector::from_fn(n, |i, _| 1.0 + 0.1 * i as f64);
    v /= v.norm();
    let mut lam = 0.0;
    for _ in 0..max_iter {
        let w = &ata * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / nw;
        if (next - lam).abs() <= rel_tol * next.abs() {
            lam = next;
            break;
        }
        lam = next;
    }
    lam.max(0.0).sqrt()
}

pub(crate) fn induced_norm_rows(rows: &[Vec<f64>], rho: u32) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    if rho == 1 {
        let n = rows[0].len();
        (0..n)
            .map(|j| rows.iter().map(|r| r[j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    } else {
        // The SVD is exact to rounding; power iteration can stall on
        // clustered singular values.
        let s = to_dmatrix(rows).singular_values();
        s.iter().cloned().fold(0.0, f64::max)
    }
}

/// Operator norm of A for the L_rho vector norm.
pub fn induced_norm(rows: &[Vec<f64>], rho: u32) -> Result<f64> {
    check_rho(rho)?;
    Ok(induced_norm_rows(rows, rho))
}

/// Upper bound on the Lipschitz constant of f under the L_rho norm: the
/// smaller of the composition bound and the norm of the global slope matrix.
pub fn global_lipschitz(f: &FunctionModel, rho: u32) -> Result<f64> {
    check_rho(rho)?;
    let comp = f.composition_lipschitz(rho);
    let full = vec![Interval::full(); f.input_dim()];
    let s = f.slope_matrix(&full, None)?;
    let mag = induced_norm_rows(&magnitude(&s), rho);
    Ok(if mag.is_finite() { comp.min(mag) } else { comp })
}

/// ||f(x) - f(c)||^rho <= alpha ||x - c||^rho on the region, from the slope
/// matrix anchored at c, capped at the global constant.
pub fn slope_alpha(f: &FunctionModel, region: &[Interval], anchor: &[f64], lipschitz: f64, rho: u32) -> Result<f64> {
    check_rho(rho)?;
    let s = f.slope_matrix(region, Some(anchor))?;
    let n = induced_norm_rows(&magnitude(&s), rho);
    let n = if n.is_finite() { n.min(lipschitz) } else { lipschitz };
    Ok(n.powi(rho as i32))
}

/// sup over the region of ||f(x) - f(c)||^rho from the output range; +inf
/// when the range is unbounded.
pub fn range_beta(f: &FunctionModel, region: &[Interval], anchor: &[f64], rho: u32) -> Result<f64> {
    check_rho(rho)?;
    let r = f.range(region, anchor)?;
    let fc = f.eval_unchecked(anchor);
    let dev = r.iter().zip(&fc).map(|(iv, &v)| iv.max_abs_dev(v));
    Ok(if rho == 1 { dev.sum() } else { dev.map(|x| x * x).sum() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Interval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use serde_json::json;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn all_builtins() -> Vec<FunctionModel> {
        vec![
            sigmoid_model(),
            bounded_linear(),
            quadruple_tank(),
            nn_layer(),
            mountain_car(),
            dubins_car(),
            clamped_diagonal(1).unwrap(),
            clamped_diagonal(4).unwrap(),
            nn_dynamics_3d(),
        ]
    }

    #[test]
    fn evaluates_benchmarks() {
        let d = dubins_car().evaluate(&[0.0, 0.0, 0.0]).unwrap();
        assert!((d[0] - 0.0).abs() < 1e-15 && (d[1] - 1.5).abs() < 1e-15 && (d[2] - 0.6).abs() < 1e-15);
        let m = mountain_car().evaluate(&[0.0, 0.0]).unwrap();
        assert!((m[0] + 0.0015).abs() < 1e-15 && m[1] == 0.0);
        assert_eq!(sigmoid_model().evaluate(&[0.0]).unwrap(), vec![0.5]);
        assert!(mountain_car().evaluate(&[0.0]).is_err());
    }

    #[test]
    fn interval_examples() {
        let r = sigmoid_model().interval_bounds(&[Interval::full()]).unwrap();
        assert_eq!((r[0].lo, r[0].hi), (0.0, 1.0));
        let mut b = ModelBuilder::new(1);
        let a = b.linear(0, vec![vec![3.0]]);
        let c = b.clamp(a, vec![-2.0], vec![2.0]);
        let r = b.build(c).unwrap().interval_bounds(&[Interval::full()]).unwrap();
        assert_eq!((r[0].lo, r[0].hi), (-2.0, 2.0));
        let mut b = ModelBuilder::new(2);
        let a = b.linear(0, vec![vec![1.0, 1.0]]);
        let r = b.build(a).unwrap().interval_bounds(&[iv(0.0, 1.0), iv(0.0, 1.0)]).unwrap();
        assert_eq!((r[0].lo, r[0].hi), (0.0, 2.0));
    }

    #[test]
    fn json_round_trip_and_validation() {
        for f in all_builtins() {
            let s = f.to_json();
            assert_eq!(FunctionModel::from_json(&s).unwrap(), f);
        }
        let bad = json!({"input_dim": 2, "nodes": [{"op": "affine", "a": [[1.0]], "b": [0.0], "inputs": [0]}]});
        assert!(FunctionModel::from_json(&bad.to_string()).is_err());
        let fwd = json!({"input_dim": 1, "nodes": [{"op": "sigmoid", "inputs": [1]}]});
        assert!(FunctionModel::from_json(&fwd.to_string()).is_err());
        let ok = json!({"input_dim": 1, "nodes": [{"op": "sigmoid", "inputs": [0]}]});
        assert_eq!(FunctionModel::from_json(&ok.to_string()).unwrap(), sigmoid_model());
    }

    #[test]
    fn affine_enclosure_is_exact() {
        let f = quadruple_tank();
        let region = vec![iv(-1.0, 2.0); 4];
        let e = f.linear_enclosure(&region, &[0.5; 4]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((e.lower_a[i][j] - QUAD_TANK_A[i][j]).abs() < 1e-15);
                assert!((e.upper_a[i][j] - QUAD_TANK_A[i][j]).abs() < 1e-15);
            }
            assert!(e.lower_b[i].abs() < 1e-12 && e.upper_b[i].abs() < 1e-12);
        }
    }

    #[test]
    fn saturated_region_gives_constant_enclosure() {
        let f = bounded_linear();
        let region = vec![iv(10.0, 11.0), iv(10.0, 12.0)];
        let e = f.linear_enclosure(&region, &[10.5, 11.0]).unwrap();
        for row in e.lower_a.iter().chain(&e.upper_a) {
            assert!(row.iter().all(|&v| v == 0.0));
        }
        let cb = e.constant_bounds();
        assert!(cb.iter().all(|c| c.lo.abs() < 1e-10 && c.hi.abs() < 1e-10));
    }

    #[test]
    fn sigmoid_slope_over_reals() {
        let f = sigmoid_model();
        let s = f.slope_matrix(&[Interval::full()], Some(&[0.0])).unwrap();
        assert!(s[0][0].lo >= 0.0 && s[0][0].hi <= 0.25 + 1e-12);
        let s5 = f.slope_matrix(&[Interval::full()], Some(&[5.0])).unwrap();
        assert!(s5[0][0].hi <= 0.13);
    }

    #[test]
    fn induced_norm_examples() {
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((induced_norm(&id, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((induced_norm(&[vec![2.0, 0.0], vec![0.0, 0.1]], 2).unwrap() - 2.0).abs() < 1e-12);
        let qt: Vec<Vec<f64>> = QUAD_TANK_A.iter().map(|r| r.to_vec()).collect();
        let n = induced_norm(&qt, 2).unwrap();
        assert!(n > 0.73 && n < 0.80, "{n}");
        assert!((induced_norm(&[vec![1.0, -2.0], vec![3.0, 0.5]], 1).unwrap() - 4.0).abs() < 1e-15);
        assert!(induced_norm(&id, 3).is_err());
    }

    #[test]
    fn power_iteration_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = rng.random_range(1..=16);
            let n = rng.random_range(1..=16);
            let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let svd = induced_norm(&a, 2).unwrap();
            let pw = spectral_norm_power(&a, 1e-14, 100_000);
            assert!((svd - pw).abs() <= 1e-6 * svd, "{svd} {pw}");
        }
    }

    #[test]
    fn spectral_norm_beats_random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: Vec<Vec<f64>> = (0..5).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let n = induced_norm(&a, 2).unwrap();
        let mut best: f64 = 0.0;
        for _ in 0..10_000 {
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let av: f64 = a.iter().map(|r| r.iter().zip(&v).map(|(p, q)| p * q).sum::<f64>().powi(2)).sum::<f64>().sqrt();
            best = best.max(av / nv);
        }
        assert!(best <= n + 1e-12 && n - best < 0.05 * n);
    }

    #[test]
    fn lipschitz_examples() {
        assert!((global_lipschitz(&sigmoid_model(), 2).unwrap() - 0.25).abs() < 1e-12);
        assert!((global_lipschitz(&clamped_diagonal(1).unwrap(), 2).unwrap() - 3.0).abs() < 1e-12);
        let qt: Vec<Vec<f64>> = QUAD_TANK_A.iter().map(|r| r.to_vec()).collect();
        assert!((global_lipschitz(&quadruple_tank(), 2).unwrap() - induced_norm(&qt, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_bounds_empirical_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in all_builtins() {
            for rho in [1, 2] {
                let l = global_lipschitz(&f, rho).unwrap();
                let d = f.input_dim();
                for _ in 0..2000 {
                    let x: Vec<f64> = (0..d).map(|_| rng.random_range(-4.0..4.0)).collect();
                    let y: Vec<f64> = x.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
                    let fx = f.evaluate(&x).unwrap();
                    let fy = f.evaluate(&y).unwrap();
                    let nrm = |a: &[f64], b: &[f64]| {
                        let it = a.iter().zip(b).map(|(p, q)| (p - q).abs());
                        if rho == 1 { it.sum::<f64>() } else { it.map(|t| t * t).sum::<f64>().sqrt() }
                    };
                    assert!(nrm(&fx, &fy) <= l * nrm(&x, &y) * (1.0 + 1e-9) + 1e-15);
                }
            }
        }
    }

    fn random_region(rng: &mut ChaCha8Rng, d: usize) -> Vec<Interval> {
        (0..d)
            .map(|_| {
                let c: f64 = rng.random_range(-4.0..4.0);
                let w: f64 = rng.random_range(0.0..3.0f64).powi(2);
                match rng.random_range(0..10) {
                    0 => Interval::full(),
                    1 => Interval { lo: f64::NEG_INFINITY, hi: c },
                    _ => iv(c - w, c + w),
                }
            })
            .collect()
    }

    fn sample_in(rng: &mut ChaCha8Rng, r: &[Interval]) -> Vec<f64> {
        r.iter()
            .map(|iv| {
                let lo = iv.lo.max(iv.hi.min(0.0) - 20.0);
                let hi = iv.hi.min(iv.lo.max(0.0) + 20.0);
                if lo == hi { lo } else { rng.random_range(lo..=hi) }
            })
            .collect()
    }

    #[test]
    fn enclosures_are_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in all_builtins() {
            let d = f.input_dim();
            for _ in 0..300 {
                let region = random_region(&mut rng, d);
                let anchor = sample_in(&mut rng, &region);
                let e = f.linear_enclosure(&region, &anchor).unwrap();
                let ibp = f.interval_bounds(&region).unwrap();
                let rng_t = f.range(&region, &anchor).unwrap();
                let s = f.slope_matrix(&region, Some(&anchor)).unwrap();
                let fc = f.evaluate(&anchor).unwrap();
                for _ in 0..30 {
                    let x = sample_in(&mut rng, &region);
                    let fx = f.evaluate(&x).unwrap();
                    let (lo, hi) = e.bounds_at(&x);
                    for i in 0..fx.len() {
                        let diff = fx[i] - fc[i];
                        let tol = 1e-9 * (1.0 + diff.abs());
                        assert!(lo[i] <= diff + tol && diff <= hi[i] + tol, "{:?} {:?} {:?}", f.nodes(), region, x);
                        assert!(ibp[i].lo - tol <= fx[i] && fx[i] <= ibp[i].hi + tol);
                        assert!(rng_t[i].lo - tol <= fx[i] && fx[i] <= rng_t[i].hi + tol);
                        let mut slo = 0.0;
                        let mut shi = 0.0;
                        for j in 0..d {
                            let r = scalar::mul_interval(s[i][j], Interval::point(x[j] - anchor[j]));
                            slo += r.lo;
                            shi += r.hi;
                        }
                        assert!(slo - tol <= diff && diff <= shi + tol);
                    }
                }
            }
        }
    }

    #[test]
    fn builtin_by_name() {
        for name in BUILTIN_NAMES {
            let p = json!({"d": 3});
            let f = builtin(name, &p).unwrap();
            let dist = benchmark_distribution(name, &p).unwrap();
            if name != "nn_dynamics_3d" {
                assert_eq!(f.input_dim(), dist.dim());
            }
        }
        assert!(builtin("nope", &json!({})).is_err());
    }
}
