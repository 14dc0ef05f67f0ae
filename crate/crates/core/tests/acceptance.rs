//! Acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! `cargo test -p wprop --test acceptance` runs everything; numeric arguments
//! select criteria, e.g. `cargo test -p wprop --test acceptance -- 3 7`.
//! Criteria in `KNOWN_RED` are reported as FAIL but do not fail the process;
//! a change in their status is printed so it gets noticed.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use wprop::bounds::{bound_thm4, bound_thm6, bound_with_lipschitz, BoundOptions};
use wprop::dynamics::{builtin_system, error_recursion, fixed_point_bound, propagate_horizon, Propagation, PropagationConfig, EpsilonPolicy};
use wprop::experiments::{empirical_error, run, two_means_1d, ExperimentConfig, ExperimentId};
use wprop::funcmodel::{benchmark_distribution, builtin, global_lipschitz, FunctionModel, ModelBuilder};
use wprop::measures::{Atom, Component, DiscreteDistribution, Distribution, Interval, ProductDistribution};
use wprop::quantize::{optimized_grid, uniform_grid, QuantizationOperator};
use wprop::validate::{exact_wasserstein, mc_wasserstein, mc_wasserstein_to_discrete, quadrature_moment};

const BENCH: [&str; 6] = ["sigmoid", "bounded_linear", "quadruple_tank", "nn_layer", "mountain_car", "dubins_car"];

/// Criteria whose failure is analysed rather than fixed.
const KNOWN_RED: [usize; 3] = [4, 5, 6];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn bench(name: &str) -> (FunctionModel, ProductDistribution) {
    (builtin(name, &Json::Null).unwrap(), benchmark_distribution(name, &Json::Null).unwrap())
}

fn prop_config() -> PropagationConfig {
    PropagationConfig {
        epsilon: EpsilonPolicy::Off,
        ..PropagationConfig::default()
    }
}

fn quad_tank_50() -> &'static Propagation {
    static P: OnceLock<Propagation> = OnceLock::new();
    P.get_or_init(|| propagate_horizon(&builtin_system("quadruple_tank").unwrap(), 50, &prop_config()).unwrap())
}

/// Random tensor quantizer: random per-axis counts (at most `max_cells`
/// cells), breakpoints at random quantiles, locations drawn inside the cells.
fn random_quantizer(p: &ProductDistribution, max_cells: usize, rng: &mut ChaCha8Rng) -> QuantizationOperator {
    let d = p.dim();
    let mut counts = vec![1usize; d];
    for _ in 0..rng.random_range(1..=24) {
        let m = rng.random_range(0..d);
        let total: usize = counts.iter().product();
        if total / counts[m] * (counts[m] + 1) <= max_cells {
            counts[m] += 1;
        }
    }
    let mut bps = Vec::with_capacity(d);
    let mut locs = Vec::with_capacity(d);
    for (c, &k) in p.components().iter().zip(&counts) {
        let mut us: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.02..0.98)).collect();
        us.sort_by(f64::total_cmp);
        let mut b: Vec<f64> = us.iter().map(|&u| c.quantile(u)).collect();
        b.dedup();
        let (lo, hi) = (c.quantile(0.005), c.quantile(0.995));
        let edges: Vec<f64> = std::iter::once(lo).chain(b.iter().copied()).chain(std::iter::once(hi)).collect();
        let l: Vec<f64> = edges
            .windows(2)
            .map(|w| {
                let (a, z) = (w[0].min(w[1]), w[0].max(w[1]));
                if z > a {
                    rng.random_range(a..z)
                } else {
                    a
                }
            })
            .collect();
        bps.push(b);
        locs.push(l);
    }
    QuantizationOperator::tensor(bps, &locs).unwrap()
}

fn pushforward(f: &FunctionModel, q: &DiscreteDistribution) -> DiscreteDistribution {
    let atoms = q
        .atoms()
        .iter()
        .map(|a| Atom { loc: f.evaluate(&a.loc).unwrap(), w: a.w })
        .collect();
    DiscreteDistribution::from_weighted(atoms).unwrap().merge_duplicates()
}

fn c1_soundness() -> Verdict {
    let (n, repeats, per_bench) = (5000, 10, 20);
    let mut fails = Vec::new();
    let mut worst: f64 = 0.0;
    for (bi, name) in BENCH.iter().enumerate() {
        let (f, p) = bench(name);
        let pd = Distribution::Product(p.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + bi as u64);
        for k in 0..per_bench {
            let q = random_quantizer(&p, 60, &mut rng);
            let bound = bound_thm6(&q, &pd, &f, 2).unwrap().value;
            let target = pushforward(&f, &q.apply(&pd).unwrap());
            let mc = mc_wasserstein_to_discrete(
                |m, s| p.sample(m, s).iter().map(|x| f.evaluate(x).unwrap()).collect(),
                &target,
                n,
                repeats,
                2,
                (bi * 100 + k) as u64,
            )
            .unwrap();
            if mc.estimate > bound + 3.0 * mc.stderr {
                fails.push(format!("{name}#{k}: mc {:.4e} > {:.4e}", mc.estimate, bound));
            }
            if bound > 0.0 {
                worst = worst.max(mc.estimate / bound);
            }
        }
    }
    let cases = BENCH.len() * per_bench;
    verdict(
        fails.is_empty(),
        format!("{}/{cases} cases sound, max mc/bound {worst:.3} {}", cases - fails.len(), fails.join("; ")),
    )
}

fn random_affine(seed: u64) -> (FunctionModel, ProductDistribution) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (din, dout) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let a: Vec<Vec<f64>> = (0..dout).map(|_| (0..din).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let b: Vec<f64> = (0..dout).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut mb = ModelBuilder::new(din);
    let y = mb.affine(ModelBuilder::INPUT, a, b);
    let mean: Vec<f64> = (0..din).map(|_| rng.random_range(-1.0..1.0)).collect();
    let var: Vec<f64> = (0..din).map(|_| rng.random_range(0.05..1.0)).collect();
    (mb.build(y).unwrap(), ProductDistribution::diag_gaussian(&mean, &var).unwrap())
}

fn c2_linear_exactness() -> Verdict {
    let mut models = vec![("quadruple_tank".to_string(), bench("quadruple_tank"))];
    models.extend((0..5).map(|s| (format!("affine{s}"), random_affine(s))));
    let mut bad = Vec::new();
    let mut max_dev: f64 = 0.0;
    for (name, (f, p)) in &models {
        let pd = Distribution::Product(p.clone());
        let q = optimized_grid(p, 100);
        let lip = global_lipschitz(f, 2).unwrap();
        let theta_d = q.theta_d(&pd, 2).unwrap();
        for theta in [0.0, 0.1, 1.0] {
            let b = bound_thm4(&q, &pd, theta, f, 2, BoundOptions::default()).unwrap().value;
            let want = lip * (theta + theta_d);
            let dev = (b - want).abs();
            max_dev = max_dev.max(dev);
            if dev > 1e-9 {
                bad.push(format!("{name} theta={theta}: {b} vs {want}"));
            }
        }
    }
    let trace = &quad_tank_50().trace;
    let col = trace
        .records
        .iter()
        .map(|r| (r.theta - r.theta_lipschitz).abs() / r.theta.max(1e-300))
        .fold(0.0f64, f64::max);
    if col > 1e-9 {
        bad.push(format!("quadruple_tank trace columns differ by {col:.2e}"));
    }
    verdict(
        bad.is_empty(),
        format!("max |thm4 - ||A||(theta+theta_d)| = {max_dev:.2e}, tank trace rel gap {col:.2e} {}", bad.join("; ")),
    )
}

fn c3_sigmoid() -> Verdict {
    let start = Instant::now();
    let (f, p) = bench("sigmoid");
    let pd = Distribution::Product(p.clone());
    let b10 = bound_thm6(&optimized_grid(&p, 10), &pd, &f, 2).unwrap().value;
    let b100 = bound_thm6(&optimized_grid(&p, 100), &pd, &f, 2).unwrap().value;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        b10 <= 5e-2 && b100 <= 1e-2 && secs <= 5.0,
        format!("|C|=10: {b10:.4e} (<= 5e-2), |C|=100: {b100:.4e} (<= 1e-2), {secs:.2}s"),
    )
}

/// Optimized-grid column of the reference comparison, rows d = 1..4,
/// columns N = 5, 10, 100, 1000.
const TABLE1_OPTIMIZED: [[f64; 4]; 4] = [
    [0.5085, 0.2731, 0.0280, 0.0087],
    [0.7867, 0.1935, 0.0723, 0.0248],
    [0.7940, 0.1982, 0.0818, 0.0410],
    [1.8681, 0.8043, 0.4078, 0.2111],
];

fn c4_table1() -> Verdict {
    let start = Instant::now();
    let out = run(&ExperimentConfig::for_id(ExperimentId::Table1)).unwrap();
    let t = out.table("table1").unwrap();
    let (ds, ns, opt, uni) = (t.column("d"), t.column("n"), t.column("optimized"), t.column("uniform"));
    let mut order = Vec::new();
    let mut factor = Vec::new();
    let mut ratio = f64::NAN;
    for i in 0..opt.len() {
        let (d, n) = (ds[i] as usize, ns[i] as usize);
        if opt[i] > uni[i] + 1e-9 {
            order.push(format!("d={d} N={n} ({:.4} > {:.4})", opt[i], uni[i]));
        }
        let j = [5, 10, 100, 1000].iter().position(|&v| v == n).unwrap();
        let r = TABLE1_OPTIMIZED[d - 1][j];
        if !(opt[i] <= 3.0 * r && r <= 3.0 * opt[i]) {
            factor.push(format!("d={d} N={n} ({:.4} vs {r})", opt[i]));
        }
        if d == 4 && n == 1000 {
            ratio = opt[i] / uni[i];
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = order.is_empty() && factor.is_empty() && ratio <= 0.6 && secs <= 600.0;
    verdict(
        ok,
        format!(
            "ordering violations [{}]; factor-3 misses [{}]; d=4 N=1000 ratio {ratio:.3}; {secs:.1}s",
            order.join(", "),
            factor.join(", ")
        ),
    )
}

fn c5_mountain_car() -> Verdict {
    let start = Instant::now();
    let sys = builtin_system("mountain_car").unwrap();
    let cfg = prop_config();
    let prop = propagate_horizon(&sys, 50, &cfg).unwrap();
    let recs = &prop.trace.records;
    let max_thm4 = recs.iter().map(|r| r.theta).fold(0.0f64, f64::max);
    let lip50 = recs[49].theta_lipschitz;
    let mut emp_bad = Vec::new();
    for t in (1..=10).chain([50]) {
        let e = empirical_error(&sys, t, &prop.states[t - 1], 1600, 10, 2, 7 + t as u64).unwrap();
        if e.estimate > recs[t - 1].theta + 3.0 * e.stderr {
            emp_bad.push(format!("t={t}: {:.4} > {:.4}", e.estimate, recs[t - 1].theta));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = max_thm4 <= 10.0 && lip50 > 1e10 && emp_bad.is_empty() && secs <= 900.0;
    verdict(
        ok,
        format!(
            "max thm4 {max_thm4:.4} (<= 10), lipschitz at t=50 {lip50:.3e} (> 1e10), empirical violations [{}], {secs:.1}s",
            emp_bad.join(", ")
        ),
    )
}

fn c6_convergence() -> Verdict {
    let mut bad = Vec::new();
    let mut ratios = Vec::new();
    for name in BENCH {
        let (f, p) = bench(name);
        let pd = Distribution::Product(p.clone());
        let v: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&n| bound_thm6(&optimized_grid(&p, n), &pd, &f, 2).unwrap().value)
            .collect();
        if !(v[1] < v[0] && v[2] < v[1] && v[2] < 0.25 * v[0]) {
            bad.push(format!("{name} {v:?}"));
        }
        ratios.push(format!("{name} {:.3}", v[2] / v[0]));
    }
    // the cube count grows like (L sqrt(2d) h / eps)^d, so the 10-d layer is left out
    let small: Vec<&str> = BENCH.iter().copied().filter(|&b| b != "nn_layer").collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut certified = 0;
    for _ in 0..10 {
        let name = small[rng.random_range(0..small.len())];
        let (f, p) = bench(name);
        let pd = Distribution::Product(p.clone());
        let lip = global_lipschitz(&f, 2).unwrap();
        let spread = p.variances().iter().sum::<f64>().sqrt();
        let eps = lip * spread * rng.random_range(0.5..2.0);
        let g = uniform_grid(&p, eps, lip, 2).unwrap();
        let theta_d = g.operator.theta_d(&pd, 2).unwrap();
        if lip * theta_d <= eps * (1.0 + 1e-12) {
            certified += 1;
        } else {
            bad.push(format!("{name} eps={eps:.3e}: L*theta_d={:.3e}", lip * theta_d));
        }
    }
    verdict(
        bad.is_empty(),
        format!("|C|=1000 / |C|=10 ratios [{}]; uniform_grid certified {certified}/10 {}", ratios.join(", "), bad.join("; ")),
    )
}

fn c7_fixed_point() -> Verdict {
    let (l, eps) = (0.5, 0.1);
    let rec = error_recursion(&vec![l; 49], &vec![0.0; 49], 0.0, eps, 1).unwrap();
    let limit = fixed_point_bound(l, eps).unwrap();
    let err = (rec.thetas[49] - limit).abs();
    let rec2 = error_recursion(&vec![l * l; 49], &vec![0.0; 49], 0.0, eps, 2).unwrap();
    let err2 = (rec2.thetas[49] - limit).abs();
    let th = quad_tank_50().trace.thetas();
    let inc = th[20..].windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0f64, f64::max);
    let bounded = th.iter().all(|v| v.is_finite());
    verdict(
        err <= 1e-6 && err2 <= 1e-6 && (limit - 0.1).abs() < 1e-15 && bounded && inc < 1e-3,
        format!(
            "theta_50 - 0.1 = {err:.1e} (rho=1), {err2:.1e} (rho=2); tank theta_50 {:.4}, max increment after t=20 {inc:.2e}",
            th[49]
        ),
    )
}

fn c8_saturation() -> Verdict {
    let mut bad = Vec::new();
    let mut gaps = Vec::new();
    for name in ["nn_layer", "mountain_car"] {
        let (f, p) = bench(name);
        let pd = Distribution::Product(p.clone());
        let q = optimized_grid(&p, 100);
        let b10 = bound_thm4(&q, &pd, 10.0, &f, 2, BoundOptions::default()).unwrap().value;
        let b100 = bound_thm4(&q, &pd, 100.0, &f, 2, BoundOptions::default()).unwrap().value;
        if (b10 - b100).abs() > 1e-9 {
            bad.push(format!("{name}: {b10} vs {b100}"));
        }
        gaps.push(format!("{name} |b(10)-b(100)| {:.1e}", (b10 - b100).abs()));
    }
    let thetas = [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0];
    let mut min_gap = f64::INFINITY;
    let mut tank_gap: f64 = 0.0;
    for name in BENCH {
        let (f, p) = bench(name);
        let pd = Distribution::Product(p.clone());
        let q = optimized_grid(&p, 100);
        for &theta in &thetas {
            let b = bound_thm4(&q, &pd, theta, &f, 2, BoundOptions::default()).unwrap().value;
            let l = bound_with_lipschitz(&q, &pd, theta, &f, 2).unwrap().value;
            let gap = l - b;
            if gap < -1e-12 * (1.0 + l.abs()) {
                bad.push(format!("{name} theta={theta}: gap {gap:.3e}"));
            }
            min_gap = min_gap.min(gap / (1.0 + l.abs()));
            if name == "quadruple_tank" {
                tank_gap = tank_gap.max(gap.abs() / (1.0 + l.abs()));
            }
        }
    }
    if tank_gap > 1e-9 {
        bad.push(format!("quadruple_tank gap {tank_gap:.2e}"));
    }
    verdict(
        bad.is_empty(),
        format!("{}; min relative gap {min_gap:.2e}; tank gap {tank_gap:.1e} {}", gaps.join(", "), bad.join("; ")),
    )
}

fn random_component(rng: &mut ChaCha8Rng) -> Component {
    if rng.random_bool(0.5) {
        Component::gaussian(rng.random_range(-2.0..2.0), rng.random_range(0.1..2.0)).unwrap()
    } else {
        let lo = rng.random_range(-2.0..1.0);
        Component::uniform(lo, lo + rng.random_range(0.1..3.0)).unwrap()
    }
}

fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let a = rng.random_range(-4.0..4.0);
    let b = a + rng.random_range(0.0..4.0);
    match rng.random_range(0..5) {
        0 => Interval { lo: f64::NEG_INFINITY, hi: b },
        1 => Interval { lo: a, hi: f64::INFINITY },
        2 => Interval::full(),
        _ => Interval { lo: a, hi: b },
    }
}

fn random_discrete(rng: &mut ChaCha8Rng) -> DiscreteDistribution {
    let n = rng.random_range(1..=7);
    let atoms = (0..n)
        .map(|_| Atom {
            loc: (0..2).map(|_| rng.random_range(-3.0..3.0)).collect(),
            w: rng.random_range(0.05..1.0),
        })
        .collect();
    DiscreteDistribution::from_weighted(atoms).unwrap()
}

fn c9_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_quad: f64 = 0.0;
    for _ in 0..1000 {
        let c = random_component(&mut rng);
        let iv = random_interval(&mut rng);
        let x = rng.random_range(-3.0..3.0);
        let rho = rng.random_range(1..=2u32);
        let closed = c.truncated_moment(&iv, x, rho).unwrap();
        let quad = quadrature_moment(&c, iv, x, rho as f64).unwrap();
        worst_quad = worst_quad.max((closed - quad).abs() / (1.0 + quad.abs()));
    }
    let mut axiom_bad = 0;
    for _ in 0..1000 {
        let (a, b, c) = (random_discrete(&mut rng), random_discrete(&mut rng), random_discrete(&mut rng));
        let rho = rng.random_range(1..=2u32);
        let w = |x: &DiscreteDistribution, y: &DiscreteDistribution| exact_wasserstein(x, y, rho).unwrap().0;
        let (ab, ba, bc, ac, aa) = (w(&a, &b), w(&b, &a), w(&b, &c), w(&a, &c), w(&a, &a));
        if aa > 1e-12 || (ab - ba).abs() > 1e-12 || ac > ab + bc + 1e-9 {
            axiom_bad += 1;
        }
    }
    let p = Distribution::Product(ProductDistribution::diag_gaussian(&[0.0], &[1.0]).unwrap());
    let q = Distribution::Product(ProductDistribution::diag_gaussian(&[1.0], &[1.0]).unwrap());
    let mc = mc_wasserstein(&p, &q, 2000, 10, 2, 9).unwrap();
    let gauss_ok = (mc.estimate - 1.0).abs() <= 0.1;

    // midpoint-Voronoi grids make the quantization bound an equality
    let mut prop2 = Vec::new();
    let mut prop2_ok = true;
    for (k, (m, v, n)) in [(0.0, 1.0, 2), (0.5, 2.0, 5), (-1.0, 0.3, 10)].into_iter().enumerate() {
        let pp = ProductDistribution::diag_gaussian(&[m], &[v]).unwrap();
        let pd = Distribution::Product(pp.clone());
        let q = optimized_grid(&pp, n);
        let theta_d = q.theta_d(&pd, 2).unwrap();
        let target = q.apply(&pd).unwrap();
        let e = mc_wasserstein_to_discrete(|s, seed| pp.sample(s, seed), &target, 5000, 10, 2, 90 + k as u64).unwrap();
        prop2_ok &= (e.estimate - theta_d).abs() <= 3.0 * e.stderr;
        prop2.push(format!("{:.4}/{:.4}±{:.1e}", e.estimate, theta_d, e.stderr));
    }
    verdict(
        worst_quad <= 1e-8 && axiom_bad == 0 && gauss_ok && prop2_ok,
        format!(
            "quadrature max rel dev {worst_quad:.1e}; axiom violations {axiom_bad}/1000; gaussian W2 {:.4}±{:.4} (1.0); equality case mc/theta_d [{}]",
            mc.estimate,
            mc.stderr,
            prop2.join(", ")
        ),
    )
}

fn c10_bimodality() -> Verdict {
    let cfg = ExperimentConfig::from_json(&json!({"budgets": [100]}).to_string(), Some(ExperimentId::Fig6)).unwrap();
    let out = run(&cfg).unwrap();
    let atoms = out.table("fig6_atoms").unwrap();
    let samples = out.table("fig6_samples").unwrap();
    let pick = |t: &wprop::experiments::Table, weights: bool| {
        let (ts, xs) = (t.column("t"), t.column("x1"));
        let ws = if weights { t.column("weight") } else { vec![1.0; xs.len()] };
        let (mut x, mut w) = (Vec::new(), Vec::new());
        for i in 0..xs.len() {
            if ts[i] == 10.0 {
                x.push(xs[i]);
                w.push(ws[i]);
            }
        }
        two_means_1d(&x, &w)
    };
    let (a, s) = (pick(atoms, true), pick(samples, false));
    let ok = match (a, s) {
        (Some(a), Some(s)) => {
            let gap_ok = (a.means[1] - a.means[0]).abs() >= 0.5 && a.masses.iter().all(|&m| m >= 0.1);
            let modes_match = (a.means[0] - s.means[0]).abs() <= 0.25 && (a.means[1] - s.means[1]).abs() <= 0.25;
            gap_ok && modes_match && out.passed()
        }
        _ => false,
    };
    verdict(ok, format!("approximation {a:?}; samples {s:?}"))
}

type Criterion = (usize, &'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "soundness", c1_soundness),
        (2, "linear exactness", c2_linear_exactness),
        (3, "sigmoid example", c3_sigmoid),
        (4, "optimized vs uniform grids", c4_table1),
        (5, "mountain car trace", c5_mountain_car),
        (6, "convergence", c6_convergence),
        (7, "fixed point", c7_fixed_point),
        (8, "saturation", c8_saturation),
        (9, "oracle cross-checks", c9_oracles),
        (10, "bimodality", c10_bimodality),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_RED.contains(&id);
        let tag = match (v.passed, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as known red)",
            (false, true) => "FAIL (known red)",
            (false, false) => "FAIL",
        };
        println!("criterion {id} {name}: {tag} [{secs:.1}s] {}", v.detail);
        if !v.passed && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
