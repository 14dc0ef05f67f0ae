//! Experiment harness: bound tables, propagation traces and figure data,
//! written as CSV plus a full-precision JSON sidecar.

mod output;

use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

pub use output::{sig6, Check, ExperimentOutput, Table, Value};

use crate::bounds::{bound_thm4, bound_thm6, bound_with_lipschitz, BoundOptions, BoundReport};
use crate::dynamics::{builtin_system, propagate_horizon, EpsilonPolicy, PropagationConfig, StochasticSystem, SystemSpec};
use crate::error::{check_rho, invalid, Result};
use crate::funcmodel::{benchmark_distribution, builtin, FunctionModel};
use crate::measures::{DiscreteDistribution, Distribution, ProductDistribution};
use crate::quantize::{optimized_grid, uniform_spacing_grid};
use crate::validate::{mc_wasserstein_to_discrete, McEstimate};

/// The six function benchmarks.
pub const BENCHMARKS: [&str; 6] = ["sigmoid", "bounded_linear", "quadruple_tank", "nn_layer", "mountain_car", "dubins_car"];

/// Systems of the propagation table.
pub const TABLE2_SYSTEMS: [&str; 3] = ["nn_dynamics_3d", "mountain_car", "quadruple_tank"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Table1,
    Fig3,
    Fig4,
    Fig5,
    Table2,
    Fig6,
    Custom,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Table1,
        ExperimentId::Fig3,
        ExperimentId::Fig4,
        ExperimentId::Fig5,
        ExperimentId::Table2,
        ExperimentId::Fig6,
        ExperimentId::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Table1 => "table1",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Table2 => "table2",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Custom => "custom",
        }
    }
}

impl FromStr for ExperimentId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub seed: u64,
    pub rho: u32,
    /// ascending |C| ladder
    pub budgets: Vec<usize>,
    pub thetas: Vec<f64>,
    pub horizon: usize,
    /// rows of propagation tables
    pub report_times: Vec<usize>,
    /// function benchmarks, or systems for table2 and fig6
    pub benchmarks: Vec<String>,
    /// dimensions of the clamped diagonal family (table1)
    pub dims: Vec<usize>,
    pub mc_samples: usize,
    pub mc_repeats: usize,
    pub propagation: PropagationConfig,
    /// custom: a function and its input law...
    pub model: Option<FunctionModel>,
    pub distribution: Option<Distribution>,
    /// ...or a stochastic system
    pub system: Option<SystemSpec>,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::for_id(ExperimentId::Custom)
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    pub fn for_id(id: ExperimentId) -> Self {
        let mut c = ExperimentConfig {
            id,
            seed: 0,
            rho: 2,
            budgets: vec![10, 100, 1000],
            thetas: vec![0.0, 0.1],
            horizon: 50,
            report_times: (1..=10).chain([50]).collect(),
            benchmarks: strings(&BENCHMARKS),
            dims: vec![1, 2, 3, 4],
            mc_samples: 1000,
            mc_repeats: 5,
            propagation: PropagationConfig {
                epsilon: EpsilonPolicy::Off,
                ..PropagationConfig::default()
            },
            model: None,
            distribution: None,
            system: None,
            out_dir: None,
        };
        match id {
            ExperimentId::Table1 => c.budgets = vec![5, 10, 100, 1000],
            ExperimentId::Fig3 => {
                c.benchmarks = strings(&["sigmoid"]);
                c.budgets = vec![5, 10, 20, 50, 100, 1000];
            }
            ExperimentId::Fig5 => {
                c.budgets = vec![100];
                c.thetas = vec![0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0];
            }
            ExperimentId::Table2 => c.benchmarks = strings(&TABLE2_SYSTEMS),
            ExperimentId::Fig6 => {
                c.benchmarks = strings(&["mountain_car"]);
                c.horizon = 10;
                c.report_times = (1..=10).collect();
                c.mc_samples = 5000;
            }
            ExperimentId::Fig4 | ExperimentId::Custom => {}
        }
        c
    }

    /// Parses a JSON config over the defaults of its id (or of `id` when the
    /// document has none). Objects merge key by key.
    pub fn from_json(text: &str, id: Option<ExperimentId>) -> Result<Self> {
        let user: Json = if text.trim().is_empty() {
            json!({})
        } else {
            serde_json::from_str(text)?
        };
        let doc_id = match user.get("id") {
            Some(v) => Some(serde_json::from_value::<ExperimentId>(v.clone())?),
            None => None,
        };
        let id = match (doc_id, id) {
            (Some(a), Some(b)) if a != b => {
                return Err(invalid(format!("config is for {} but {} was requested", a.as_str(), b.as_str())))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(invalid("experiment id missing")),
        };
        let mut base = serde_json::to_value(ExperimentConfig::for_id(id))?;
        merge(&mut base, user);
        let cfg: ExperimentConfig = serde_json::from_value(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return Err(invalid("budgets must be positive"));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("budgets must be ascending"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon must be >= 1"));
        }
        if self.thetas.iter().any(|t| !(*t >= 0.0)) {
            return Err(invalid("thetas must be >= 0"));
        }
        if self.report_times.iter().any(|&t| t == 0 || t > self.horizon) {
            return Err(invalid("report times must lie in 1..=horizon"));
        }
        if self.mc_samples == 0 || self.mc_repeats == 0 {
            return Err(invalid("Monte-Carlo sizes must be positive"));
        }
        Ok(())
    }
}

fn merge(base: &mut Json, over: Json) {
    match (base, over) {
        (Json::Object(b), Json::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let (tables, checks) = match cfg.id {
        ExperimentId::Table1 => table1(cfg)?,
        ExperimentId::Fig3 => fig3(cfg)?,
        ExperimentId::Fig4 => fig4(cfg)?,
        ExperimentId::Fig5 => fig5(cfg)?,
        ExperimentId::Table2 => table2(cfg)?,
        ExperimentId::Fig6 => fig6(cfg)?,
        ExperimentId::Custom => custom(cfg)?,
    };
    Ok(ExperimentOutput {
        id: cfg.id.as_str().to_string(),
        tables,
        checks,
        config: serde_json::to_value(cfg)?,
    })
}

type Outcome = (Vec<Table>, Vec<Check>);

fn benchmark(name: &str) -> Result<(FunctionModel, ProductDistribution)> {
    Ok((builtin(name, &Json::Null)?, benchmark_distribution(name, &Json::Null)?))
}

fn report_cells(r: &BoundReport) -> Vec<Value> {
    vec![r.value.into(), r.theta_d.into(), r.alpha_max.into(), r.beta_sum.into(), r.lipschitz.into()]
}

const REPORT_COLUMNS: [&str; 5] = ["bound", "theta_d", "alpha_max", "beta_sum", "lipschitz"];

fn with_report_columns<'a>(lead: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    lead.iter().chain(&REPORT_COLUMNS).chain(tail).copied().collect()
}

/// No-ambiguity bound at theta = 0, ball bound otherwise, on the optimized grid.
fn bound_at(f: &FunctionModel, p: &ProductDistribution, n: usize, theta: f64, rho: u32) -> Result<BoundReport> {
    let q = optimized_grid(p, n);
    let pd = Distribution::Product(p.clone());
    if theta == 0.0 {
        bound_thm6(&q, &pd, f, rho)
    } else {
        bound_thm4(&q, &pd, theta, f, rho, BoundOptions::default())
    }
}

fn table1(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cells: Vec<(usize, usize)> = cfg.dims.iter().flat_map(|&d| cfg.budgets.iter().map(move |&n| (d, n))).collect();
    let rows: Vec<Result<Vec<Value>>> = cells
        .par_iter()
        .map(|&(d, n)| {
            let params = json!({ "d": d });
            let f = builtin("clamped_diagonal", &params)?;
            let p = benchmark_distribution("clamped_diagonal", &params)?;
            let pd = Distribution::Product(p.clone());
            let opt = bound_thm6(&optimized_grid(&p, n), &pd, &f, cfg.rho)?;
            let uni = bound_thm6(&uniform_spacing_grid(&p, n), &pd, &f, cfg.rho)?;
            Ok(vec![
                d.into(),
                n.into(),
                opt.value.into(),
                uni.value.into(),
                opt.theta_d.into(),
                uni.theta_d.into(),
                opt.alpha_max.into(),
                opt.beta_sum.into(),
            ])
        })
        .collect();
    let mut t = Table::new(
        "table1",
        &["d", "n", "optimized", "uniform", "theta_d_optimized", "theta_d_uniform", "alpha_max", "beta_sum"],
    );
    for r in rows {
        t.push(r?);
    }
    let mut checks = Vec::new();
    let opt = t.column("optimized");
    let ok = opt.iter().all(|v| v.is_finite() && *v >= 0.0);
    checks.push(Check::new("finite_bounds", ok, "every bound is finite and >= 0"));
    let uni = t.column("uniform");
    let (ds, ns) = (t.column("d"), t.column("n"));
    let bad: Vec<String> = (0..opt.len())
        .filter(|&i| opt[i] > uni[i] + 1e-9)
        .map(|i| format!("d={} n={}", ds[i], ns[i]))
        .collect();
    checks.push(Check::new("optimized_le_uniform", bad.is_empty(), bad.join("; ")));
    let bad: Vec<String> = (1..opt.len())
        .filter(|&i| ds[i] == ds[i - 1] && ns[i] > ns[i - 1] && opt[i] > opt[i - 1] * (1.0 + 1e-9))
        .map(|i| format!("d={} n={}", ds[i], ns[i]))
        .collect();
    checks.push(Check::new("optimized_nonincreasing", bad.is_empty(), bad.join("; ")));
    Ok((vec![t], checks))
}

fn ladder(name: &str, f: &FunctionModel, p: &ProductDistribution, cfg: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let cells: Vec<(usize, f64)> = cfg.budgets.iter().flat_map(|&n| cfg.thetas.iter().map(move |&t| (n, t))).collect();
    let rows: Vec<Result<Vec<Value>>> = cells
        .par_iter()
        .map(|&(n, theta)| {
            let r = bound_at(f, p, n, theta, cfg.rho)?;
            let q = optimized_grid(p, n);
            let lip = bound_with_lipschitz(&q, &Distribution::Product(p.clone()), theta, f, cfg.rho)?;
            let mut row: Vec<Value> = vec![name.into(), n.into(), theta.into(), format!("{:?}", r.method).to_lowercase().into()];
            row.extend(report_cells(&r));
            row.push(lip.value.into());
            Ok(row)
        })
        .collect();
    for r in rows {
        table.push(r?);
    }
    Ok(())
}

/// Non-increasing bound in |C| at theta = 0, per benchmark.
fn monotone_check(t: &Table) -> Check {
    let (b, n, th, v) = (t.col("benchmark").unwrap(), t.col("n").unwrap(), t.col("theta").unwrap(), t.col("bound").unwrap());
    let mut bad = Vec::new();
    let mut last: Option<(String, f64)> = None;
    for r in &t.rows {
        if r[th].as_f64() != Some(0.0) {
            continue;
        }
        let name = match &r[b] {
            Value::Text(s) => s.clone(),
            _ => String::new(),
        };
        let val = r[v].as_f64().unwrap_or(f64::NAN);
        if let Some((ln, lv)) = &last {
            if *ln == name && val > lv * (1.0 + 1e-9) + 1e-15 {
                bad.push(format!("{name} n={:?}", r[n]));
            }
        }
        last = Some((name, val));
    }
    Check::new("nonincreasing_in_budget", bad.is_empty(), bad.join("; "))
}

fn fig4_like(cfg: &ExperimentConfig, name: &str) -> Result<Outcome> {
    let mut t = Table::new(name, &with_report_columns(&["benchmark", "n", "theta", "method"], &["lipschitz_bound"]));
    for b in &cfg.benchmarks {
        let (f, p) = benchmark(b)?;
        ladder(b, &f, &p, cfg, &mut t)?;
    }
    let checks = vec![monotone_check(&t)];
    Ok((vec![t], checks))
}

fn fig3(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (mut tables, checks) = fig4_like(cfg, "fig3")?;
    // the approximating measure at the smallest budget
    let (f, p) = benchmark(&cfg.benchmarks[0])?;
    let n = cfg.budgets[0];
    let q = optimized_grid(&p, n);
    let pushed = q.cells(&Distribution::Product(p), cfg.rho)?.to_discrete();
    let mut atoms = Table::new("fig3_atoms", &["n", "location", "value", "weight"]);
    for a in pushed.atoms() {
        let y = f.evaluate(&a.loc)?;
        atoms.push(vec![n.into(), a.loc[0].into(), y[0].into(), a.w.into()]);
    }
    tables.push(atoms);
    Ok((tables, checks))
}

fn fig4(cfg: &ExperimentConfig) -> Result<Outcome> {
    fig4_like(cfg, "fig4")
}

fn fig5(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new(
        "fig5",
        &with_report_columns(&["benchmark", "n", "theta"], &["lipschitz_bound", "gap"]),
    );
    for b in &cfg.benchmarks {
        let (f, p) = benchmark(b)?;
        let pd = Distribution::Product(p.clone());
        for &n in &cfg.budgets {
            let q = optimized_grid(&p, n);
            let rows: Vec<Result<Vec<Value>>> = cfg
                .thetas
                .par_iter()
                .map(|&theta| {
                    let r = bound_thm4(&q, &pd, theta, &f, cfg.rho, BoundOptions::default())?;
                    let lip = bound_with_lipschitz(&q, &pd, theta, &f, cfg.rho)?;
                    let mut row: Vec<Value> = vec![b.as_str().into(), n.into(), theta.into()];
                    row.extend(report_cells(&r));
                    row.push(lip.value.into());
                    row.push((lip.value - r.value).into());
                    Ok(row)
                })
                .collect();
            for r in rows {
                t.push(r?);
            }
        }
    }
    let gaps = t.column("gap");
    let lips = t.column("lipschitz_bound");
    let bad: Vec<usize> = gaps
        .iter()
        .zip(&lips)
        .enumerate()
        .filter(|(_, (g, l))| !(**g >= -1e-12 * (1.0 + l.abs())))
        .map(|(i, _)| i)
        .collect();
    let checks = vec![Check::new("gap_nonnegative", bad.is_empty(), format!("rows {bad:?}"))];
    Ok((vec![t], checks))
}

/// Monte-Carlo estimate of W_rho between the simulated state law at time t
/// and an approximation of it.
pub fn empirical_error(
    sys: &StochasticSystem,
    t: usize,
    approx: &DiscreteDistribution,
    n: usize,
    repeats: usize,
    rho: u32,
    seed: u64,
) -> Result<McEstimate> {
    mc_wasserstein_to_discrete(
        |k, s| sys.simulate(k, &[t], s).swap_remove(0),
        approx,
        n,
        repeats,
        rho,
        seed,
    )
}

fn propagation_table(sys: &StochasticSystem, cfg: &ExperimentConfig, table: &mut Table, checks: &mut Vec<Check>) -> Result<()> {
    let mut pc = cfg.propagation.clone();
    pc.rho = cfg.rho;
    pc.seed = cfg.seed;
    let prop = propagate_horizon(sys, cfg.horizon, &pc)?;
    let mut bad = Vec::new();
    for &t in &cfg.report_times {
        let rec = &prop.trace.records[t - 1];
        let emp = empirical_error(sys, t, &prop.states[t - 1], cfg.mc_samples, cfg.mc_repeats, cfg.rho, cfg.seed + t as u64)?;
        if emp.estimate > rec.theta + 3.0 * emp.stderr {
            bad.push(t);
        }
        table.push(vec![
            sys.name.as_str().into(),
            t.into(),
            emp.estimate.into(),
            emp.stderr.into(),
            rec.theta_lipschitz.into(),
            rec.theta.into(),
            rec.theta_d.into(),
            rec.state_bound.into(),
            rec.noise_bound.into(),
            rec.alpha_max.into(),
            rec.beta_sum.into(),
            format!("{:?}", rec.method).to_lowercase().into(),
            rec.clusters.into(),
            rec.support.into(),
        ]);
    }
    checks.push(Check::new(
        format!("{}_empirical_within_bound", sys.name),
        bad.is_empty(),
        format!("violations at t = {bad:?}"),
    ));
    Ok(())
}

const TABLE2_COLUMNS: [&str; 14] = [
    "system",
    "t",
    "emp",
    "emp_stderr",
    "rmk1",
    "thm4",
    "theta_d",
    "state_bound",
    "noise_bound",
    "alpha_max",
    "beta_sum",
    "method",
    "clusters",
    "support",
];

fn table2(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new("table2", &TABLE2_COLUMNS);
    let mut checks = Vec::new();
    for name in &cfg.benchmarks {
        let sys = builtin_system(name)?;
        propagation_table(&sys, cfg, &mut t, &mut checks)?;
    }
    Ok((vec![t], checks))
}

/// Best split of weighted 1-D points into two groups (exact 1-D 2-means).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMeans {
    pub means: [f64; 2],
    pub masses: [f64; 2],
}

pub fn two_means_1d(xs: &[f64], ws: &[f64]) -> Option<TwoMeans> {
    let mut pts: Vec<(f64, f64)> = xs.iter().copied().zip(ws.iter().copied()).filter(|p| p.1 > 0.0).collect();
    if pts.len() < 2 {
        return None;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (tw, tx, txx) = pts
        .iter()
        .fold((0.0, 0.0, 0.0), |(w, x, xx), &(p, q)| (w + q, x + q * p, xx + q * p * p));
    let (mut w, mut x, mut xx) = (0.0, 0.0, 0.0);
    let mut best: Option<(f64, TwoMeans)> = None;
    for i in 0..pts.len() - 1 {
        let (p, q) = pts[i];
        w += q;
        x += q * p;
        xx += q * p * p;
        if pts[i + 1].0 == p {
            continue;
        }
        let (w2, x2, xx2) = (tw - w, tx - x, txx - xx);
        let cost = (xx - x * x / w) + (xx2 - x2 * x2 / w2);
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((
                cost,
                TwoMeans {
                    means: [x / w, x2 / w2],
                    masses: [w / tw, w2 / tw],
                },
            ));
        }
    }
    best.map(|b| b.1)
}

/// Two groups at least `gap` apart holding `min_mass` each.
pub fn is_bimodal(s: &TwoMeans, gap: f64, min_mass: f64) -> bool {
    (s.means[1] - s.means[0]).abs() >= gap && s.masses.iter().all(|&m| m >= min_mass)
}

fn fig6(cfg: &ExperimentConfig) -> Result<Outcome> {
    let name = cfg.benchmarks.first().ok_or_else(|| invalid("fig6 needs a system"))?;
    let sys = builtin_system(name)?;
    let mut pc = cfg.propagation.clone();
    pc.rho = cfg.rho;
    pc.seed = cfg.seed;
    pc.state_budget = cfg.budgets[0].max(1);
    let prop = propagate_horizon(&sys, cfg.horizon, &pc)?;
    let d = sys.state_dim();
    let coords: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let mut ac: Vec<&str> = vec!["t"];
    ac.extend(coords.iter().map(String::as_str));
    ac.push("weight");
    let mut atoms = Table::new("fig6_atoms", &ac);
    let mut samples = Table::new("fig6_samples", &ac[..ac.len() - 1]);
    let times: Vec<usize> = cfg.report_times.clone();
    let sims = sys.simulate(cfg.mc_samples, &times, cfg.seed);
    let mut sorted = times.clone();
    sorted.sort_unstable();
    sorted.dedup();
    for (k, &t) in sorted.iter().enumerate() {
        for a in prop.states[t - 1].atoms() {
            let mut row: Vec<Value> = vec![t.into()];
            row.extend(a.loc.iter().map(|&x| Value::from(x)));
            row.push(a.w.into());
            atoms.push(row);
        }
        for x in &sims[k] {
            let mut row: Vec<Value> = vec![t.into()];
            row.extend(x.iter().map(|&v| Value::from(v)));
            samples.push(row);
        }
    }
    let last = cfg.horizon;
    let st = &prop.states[last - 1];
    let xs: Vec<f64> = st.atoms().iter().map(|a| a.loc[0]).collect();
    let split = two_means_1d(&xs, &st.weights());
    let ok = split.is_some_and(|s| is_bimodal(&s, 0.5, 0.1));
    let mut checks = vec![Check::new(
        "approximation_bimodal",
        ok,
        format!("two-means split of x1 at t={last}: {split:?}"),
    )];
    if let Some(k) = sorted.iter().position(|&t| t == last) {
        let xs: Vec<f64> = sims[k].iter().map(|x| x[0]).collect();
        let ws = vec![1.0; xs.len()];
        let split = two_means_1d(&xs, &ws);
        let ok = split.is_some_and(|s| is_bimodal(&s, 0.5, 0.1));
        checks.push(Check::new("samples_bimodal", ok, format!("two-means split of x1 at t={last}: {split:?}")));
    }
    Ok((vec![atoms, samples], checks))
}

fn custom(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(spec) = &cfg.system {
        let sys = spec.clone().build()?;
        let mut t = Table::new("custom", &TABLE2_COLUMNS);
        let mut checks = Vec::new();
        propagation_table(&sys, cfg, &mut t, &mut checks)?;
        return Ok((vec![t], checks));
    }
    let (f, p) = match (&cfg.model, &cfg.distribution) {
        (Some(f), Some(Distribution::Product(p))) => (f.clone(), p.clone()),
        (Some(_), Some(_)) => return Err(invalid("custom bounds need a product input distribution")),
        _ => return Err(invalid("custom experiment needs either system or model + distribution")),
    };
    let mut t = Table::new("custom", &with_report_columns(&["benchmark", "n", "theta", "method"], &["lipschitz_bound"]));
    ladder("custom", &f, &p, cfg, &mut t)?;
    let checks = vec![monotone_check(&t)];
    Ok((vec![t], checks))
}
