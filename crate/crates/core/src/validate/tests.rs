use super::*;
use crate::funcmodel::{builtin, ModelBuilder};
use crate::measures::{Atom, Interval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn disc(pts: &[(&[f64], f64)]) -> DiscreteDistribution {
    DiscreteDistribution::new(pts.iter().map(|(l, w)| Atom { loc: l.to_vec(), w: *w }).collect()).unwrap()
}

fn random_disc(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DiscreteDistribution {
    let ws: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = ws.iter().sum();
    DiscreteDistribution::new(
        ws.iter()
            .map(|w| Atom {
                loc: (0..d).map(|_| rng.random_range(-2.0..2.0)).collect(),
                w: w / s,
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn exact_examples() {
    let a = disc(&[(&[0.0], 0.5), (&[1.0], 0.5)]);
    assert_eq!(exact_wasserstein(&a, &a, 2).unwrap().0, 0.0);
    let b = disc(&[(&[0.5], 1.0)]);
    assert!((exact_wasserstein(&a, &b, 2).unwrap().0 - 0.5).abs() < 1e-12);
    let x = DiscreteDistribution::dirac(vec![0.0, 0.0]);
    let y = DiscreteDistribution::dirac(vec![3.0, 4.0]);
    assert!((exact_wasserstein(&x, &y, 2).unwrap().0 - 5.0).abs() < 1e-12);
    assert!((exact_wasserstein(&x, &y, 1).unwrap().0 - 7.0).abs() < 1e-12);
}

/// Brute-force oracle in 1-D: W_rho between sorted quantile functions.
fn quantile_oracle(a: &DiscreteDistribution, b: &DiscreteDistribution, rho: u32) -> f64 {
    let sorted = |d: &DiscreteDistribution| {
        let mut v: Vec<(f64, f64)> = d.atoms().iter().map(|t| (t.loc[0], t.w)).collect();
        v.sort_by(|p, q| p.0.total_cmp(&q.0));
        v
    };
    let (pa, pb) = (sorted(a), sorted(b));
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (pa[0].1, pb[0].1);
    let mut cost = 0.0;
    while i < pa.len() && j < pb.len() {
        let m = ra.min(rb);
        cost += m * (pa[i].0 - pb[j].0).abs().powi(rho as i32);
        ra -= m;
        rb -= m;
        if ra <= 1e-15 {
            i += 1;
            if i < pa.len() {
                ra = pa[i].1;
            }
        }
        if rb <= 1e-15 {
            j += 1;
            if j < pb.len() {
                rb = pb[j].1;
            }
        }
    }
    cost.powf(1.0 / rho as f64)
}

#[test]
fn matches_one_dimensional_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let n1 = rng.random_range(1..30);
        let n2 = rng.random_range(1..30);
        let a = random_disc(&mut rng, n1, 1);
        let b = random_disc(&mut rng, n2, 1);
        for rho in [1, 2] {
            let (w, plan) = exact_wasserstein(&a, &b, rho).unwrap();
            let o = quantile_oracle(&a, &b, rho);
            assert!((w - o).abs() < 1e-9, "{w} {o}");
            let rs = plan.row_sums(a.len());
            let cs = plan.col_sums(b.len());
            for (x, y) in rs.iter().zip(a.weights()) {
                assert!((x - y).abs() < 1e-9);
            }
            for (x, y) in cs.iter().zip(b.weights()) {
                assert!((x - y).abs() < 1e-9);
            }
            assert!((plan.mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn metric_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..60 {
        let (na, nb, nc) = (rng.random_range(1..25), rng.random_range(1..25), rng.random_range(1..25));
        let a = random_disc(&mut rng, na, 2);
        let b = random_disc(&mut rng, nb, 2);
        let c = random_disc(&mut rng, nc, 2);
        for rho in [1, 2] {
            let ab = exact_wasserstein(&a, &b, rho).unwrap().0;
            let ba = exact_wasserstein(&b, &a, rho).unwrap().0;
            let bc = exact_wasserstein(&b, &c, rho).unwrap().0;
            let ac = exact_wasserstein(&a, &c, rho).unwrap().0;
            assert!(exact_wasserstein(&a, &a, rho).unwrap().0 < 1e-9);
            assert!((ab - ba).abs() < 1e-12 * (1.0 + ab));
            assert!(ac <= ab + bc + 1e-9);
        }
    }
}

/// Brute force over the vertices of the transport polytope for tiny
/// problems: enumerate spanning-tree bases via all (n1+n2-1)-subsets.
fn brute_force_cost(a: &[f64], b: &[f64], cost: &[f64]) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    let m = n1 * n2;
    let k = n1 + n2 - 1;
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        // solve the basis by peeling leaves
        let mut ra = a.to_vec();
        let mut rb = b.to_vec();
        let mut used = vec![false; k];
        let mut flow = vec![0.0; k];
        let mut ok = true;
        for _ in 0..k {
            let mut progress = false;
            for t in 0..k {
                if used[t] {
                    continue;
                }
                let (i, j) = (idx[t] / n2, idx[t] % n2);
                let deg_i = (0..k).filter(|&s| !used[s] && idx[s] / n2 == i).count();
                let deg_j = (0..k).filter(|&s| !used[s] && idx[s] % n2 == j).count();
                if deg_i == 1 {
                    flow[t] = ra[i];
                } else if deg_j == 1 {
                    flow[t] = rb[j];
                } else {
                    continue;
                }
                ra[i] -= flow[t];
                rb[j] -= flow[t];
                used[t] = true;
                progress = true;
                break;
            }
            if !progress {
                ok = false;
                break;
            }
        }
        if ok
            && flow.iter().all(|&f| f >= -1e-12)
            && ra.iter().chain(&rb).all(|r| r.abs() < 1e-9)
        {
            let c: f64 = (0..k).map(|t| flow[t] * cost[idx[t]]).sum();
            best = best.min(c);
        }
        // next combination
        let mut p = k;
        loop {
            if p == 0 {
                return best;
            }
            p -= 1;
            if idx[p] != p + m - k {
                break;
            }
            if p == 0 {
                return best;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

#[test]
fn pushforward_identity_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let f = builtin("dubins_car", &json!({})).unwrap();
    for _ in 0..15 {
        let (np, nq) = (rng.random_range(1..5), rng.random_range(1..5));
        let p = random_disc(&mut rng, np, 3);
        let q = random_disc(&mut rng, nq, 3);
        let push = |d: &DiscreteDistribution| {
            DiscreteDistribution::new(
                d.atoms()
                    .iter()
                    .map(|t| Atom { loc: f.evaluate(&t.loc).unwrap(), w: t.w })
                    .collect(),
            )
            .unwrap()
        };
        let direct = exact_wasserstein(&push(&p), &push(&q), 2).unwrap().0;
        let cost: Vec<f64> = p
            .atoms()
            .iter()
            .flat_map(|s| {
                let fs = f.evaluate(&s.loc).unwrap();
                q.atoms()
                    .iter()
                    .map(|t| dist_pow(&fs, &f.evaluate(&t.loc).unwrap(), 2))
                    .collect::<Vec<_>>()
            })
            .collect();
        let bf = brute_force_cost(&p.weights(), &q.weights(), &cost).sqrt();
        assert!((direct - bf).abs() < 1e-9, "{direct} {bf}");
    }
}

#[test]
fn size_cap_is_enforced() {
    let pts: Vec<Vec<f64>> = (0..2001).map(|i| vec![i as f64]).collect();
    assert!(matches!(empirical_wasserstein(&pts, &pts, 2), Err(Error::TooLarge { .. })));
}

#[test]
fn assignment_of_shifted_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs: Vec<Vec<f64>> = (0..300).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    let ys: Vec<Vec<f64>> = xs.iter().map(|x| vec![x[0] + 10.0, x[1]]).collect();
    let w = empirical_wasserstein(&xs, &ys, 2).unwrap();
    assert!((w - 10.0).abs() < 1e-9, "{w}");
}

#[test]
fn mc_examples() {
    let d0 = Distribution::Discrete(DiscreteDistribution::dirac(vec![0.0]));
    let e = mc_wasserstein(&d0, &d0, 50, 3, 2, 1).unwrap();
    assert_eq!((e.estimate, e.stderr), (0.0, 0.0));
    let p = ProductDistribution::diag_gaussian(&[0.0], &[1.0]).unwrap();
    let q = ProductDistribution::diag_gaussian(&[1.0], &[1.0]).unwrap();
    assert!((gaussian_w2(&p, &q).unwrap() - 1.0).abs() < 1e-15);
    let e = mc_wasserstein(&Distribution::Product(p.clone()), &Distribution::Product(q), 1000, 4, 2, 7).unwrap();
    assert!((e.estimate - 1.0).abs() < 0.1, "{e:?}");
    // same distribution: positive bias that shrinks with n
    let pp = Distribution::Product(p);
    let small = mc_wasserstein(&pp, &pp, 100, 5, 2, 3).unwrap().estimate;
    let large = mc_wasserstein(&pp, &pp, 1000, 5, 2, 3).unwrap().estimate;
    assert!(small > 0.0 && large > 0.0 && large < small);
}

#[test]
fn quadrature_examples() {
    let u = Component::uniform(0.0, 1.0).unwrap();
    let v = quadrature_moment(&u, Interval::new(0.0, 1.0).unwrap(), 0.0, 3.0).unwrap();
    assert!((v - 0.25).abs() < 1e-12);
    assert_eq!(quadrature_moment(&u, Interval::new(0.5, 0.5).unwrap(), 0.0, 2.0).unwrap(), 0.0);
    let g = Component::gaussian(0.0, 1.0).unwrap();
    let v = quadrature_moment(&g, Interval::full(), 0.0, 2.0).unwrap();
    assert!((v - 1.0).abs() < 1e-10);
}

#[test]
fn quadrature_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let comp = if rng.random_bool(0.5) {
            Component::gaussian(rng.random_range(-3.0..3.0), rng.random_range(0.05..3.0)).unwrap()
        } else {
            let lo = rng.random_range(-3.0..3.0);
            Component::uniform(lo, lo + rng.random_range(0.1..4.0)).unwrap()
        };
        let a: f64 = rng.random_range(-6.0..6.0);
        let b = a + rng.random_range(0.0..6.0);
        let iv = match rng.random_range(0..4) {
            0 => Interval::full(),
            1 => Interval { lo: f64::NEG_INFINITY, hi: b },
            2 => Interval { lo: a, hi: f64::INFINITY },
            _ => Interval::new(a, b).unwrap(),
        };
        let c: f64 = rng.random_range(-4.0..4.0);
        for rho in [1u32, 2] {
            let q = quadrature_moment(&comp, iv, c, rho as f64).unwrap();
            let m = comp.truncated_moment(&iv, c, rho).unwrap();
            assert!((q - m).abs() <= 1e-9 * (1.0 + m.abs()), "{comp:?} {iv:?} {c} {rho}: {q} vs {m}");
        }
    }
}

#[test]
fn pushforward_map_changes_cost() {
    let mut b = ModelBuilder::new(1);
    let n = b.linear(0, vec![vec![2.0]]);
    let f = b.build(n).unwrap();
    let a = disc(&[(&[0.0], 1.0)]);
    let c = disc(&[(&[1.0], 1.0)]);
    let fa = disc(&[(&f.evaluate(&[0.0]).unwrap(), 1.0)]);
    let fc = disc(&[(&f.evaluate(&[1.0]).unwrap(), 1.0)]);
    assert_eq!(exact_wasserstein(&fa, &fc, 2).unwrap().0, 2.0 * exact_wasserstein(&a, &c, 2).unwrap().0);
}
