use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wprop::bounds::{bound_thm4, bound_thm6, bound_with_lipschitz, BoundOptions, BoundReport};
use wprop::dynamics::{propagate_horizon, EpsilonPolicy, PropagationConfig, SystemSpec};
use wprop::experiments::{self, ExperimentConfig, ExperimentId, Table};
use wprop::funcmodel::{builtin, FunctionModel};
use wprop::measures::Distribution;
use wprop::quantize::{optimized_grid, uniform_spacing_grid, QuantizationOperator};
use wprop::validate::mc_wasserstein;
use wprop::{Error, Result};

#[derive(Parser)]
#[command(name = "wprop", version, about = "Discrete approximations of pushforward measures with certified Wasserstein bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    Optimized,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundMethod {
    Thm4,
    Thm6,
    Lipschitz,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a grid quantizer for a product distribution; prints theta_d.
    Quantize {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        rho: u32,
        #[arg(long, value_enum, default_value = "optimized")]
        grid: GridKind,
    },
    /// Bound W_rho between f#P and its discrete approximation; JSON report on stdout.
    Bound {
        /// model JSON file, or builtin:<name>
        #[arg(long = "f")]
        model: String,
        #[arg(long)]
        dist: PathBuf,
        /// quantizer JSON; an optimized grid of --budget locations otherwise
        #[arg(long)]
        quant: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 2)]
        rho: u32,
        /// defaults to thm6 at theta = 0 and thm4 otherwise
        #[arg(long, value_enum)]
        method: Option<BoundMethod>,
    },
    /// Propagate a stochastic system and write the error trace.
    Propagate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        horizon: usize,
        /// per-step quantization target; the first step's error when absent
        #[arg(long, conflicts_with = "fixed_budget")]
        epsilon: Option<f64>,
        /// keep the budgets fixed
        #[arg(long)]
        fixed_budget: bool,
        #[arg(long, default_value_t = 100)]
        state_budget: usize,
        #[arg(long, default_value_t = 25)]
        noise_budget: usize,
        #[arg(long, default_value_t = 2)]
        rho: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_omega: f64,
        /// Monte-Carlo trajectories for an mc_estimate column
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_dists: Option<PathBuf>,
    },
    /// Monte-Carlo estimate of W_rho between two distributions.
    Validate {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 2)]
        rho: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named experiment; exit code 1 when an embedded check fails.
    Experiment {
        #[arg(long)]
        id: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write(p: &Path, s: &str) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    }
    fs::write(p, s).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_model(spec: &str) -> Result<FunctionModel> {
    match spec.strip_prefix("builtin:") {
        Some(name) => builtin(name, &serde_json::Value::Null),
        None => FunctionModel::from_json(&read(Path::new(spec))?),
    }
}

fn product(d: Distribution) -> Result<wprop::measures::ProductDistribution> {
    match d {
        Distribution::Product(p) => Ok(p),
        Distribution::Discrete(_) => Err(Error::InvalidArgument("grid quantizers need a product distribution".into())),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Quantize { dist, budget, out, rho, grid } => {
            let p = Distribution::from_json(&read(&dist)?)?;
            let pp = product(p.clone())?;
            if budget == 0 {
                return Err(Error::InvalidArgument("budget must be >= 1".into()));
            }
            let q = match grid {
                GridKind::Optimized => optimized_grid(&pp, budget),
                GridKind::Uniform => uniform_spacing_grid(&pp, budget),
            };
            if let Some(out) = out {
                write(&out, &q.to_json())?;
            }
            println!("{}", q.theta_d(&p, rho)?);
        }
        Cmd::Bound {
            model,
            dist,
            quant,
            budget,
            theta,
            rho,
            method,
        } => {
            let f = load_model(&model)?;
            let p = Distribution::from_json(&read(&dist)?)?;
            let q = match quant {
                Some(path) => QuantizationOperator::from_json(&read(&path)?)?,
                None => optimized_grid(&product(p.clone())?, budget.max(1)),
            };
            let method = method.unwrap_or(if theta == 0.0 { BoundMethod::Thm6 } else { BoundMethod::Thm4 });
            let r: BoundReport = match method {
                BoundMethod::Thm4 => bound_thm4(&q, &p, theta, &f, rho, BoundOptions::default())?,
                BoundMethod::Thm6 => {
                    if theta != 0.0 {
                        return Err(Error::InvalidArgument("thm6 needs theta = 0".into()));
                    }
                    bound_thm6(&q, &p, &f, rho)?
                }
                BoundMethod::Lipschitz => bound_with_lipschitz(&q, &p, theta, &f, rho)?,
            };
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Cmd::Propagate {
            system,
            horizon,
            epsilon,
            fixed_budget,
            state_budget,
            noise_budget,
            rho,
            seed,
            theta0,
            theta_omega,
            mc,
            out,
            dump_dists,
        } => {
            let sys = SystemSpec::from_json(&read(&system)?)?;
            let cfg = PropagationConfig {
                state_budget,
                noise_budget,
                epsilon: match (epsilon, fixed_budget) {
                    (Some(e), _) => EpsilonPolicy::Fixed(e),
                    (None, true) => EpsilonPolicy::Off,
                    (None, false) => EpsilonPolicy::FirstStep,
                },
                rho,
                seed,
                theta0,
                theta_omega,
                ..PropagationConfig::default()
            };
            let prop = propagate_horizon(&sys, horizon, &cfg)?;
            let mut cols = vec!["t", "theta_t", "theta_d_t", "support", "theta_lipschitz"];
            if mc.is_some() {
                cols.extend(["mc_estimate", "mc_stderr"]);
            }
            cols.push("seconds");
            let mut t = Table::new("trace", &cols);
            for (r, st) in prop.trace.records.iter().zip(&prop.states) {
                let mut row = vec![r.t.into(), r.theta.into(), r.theta_d.into(), r.support.into(), r.theta_lipschitz.into()];
                if let Some(n) = mc {
                    let e = experiments::empirical_error(&sys, r.t, st, n, 5, rho, seed.wrapping_add(r.t as u64))?;
                    row.extend([e.estimate.into(), e.stderr.into()]);
                }
                row.push(r.seconds.into());
                t.push(row);
            }
            let csv = t.to_csv()?;
            match out {
                Some(p) => write(&p, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(dir) = dump_dists {
                for (k, st) in prop.states.iter().enumerate() {
                    let d = Distribution::Discrete(st.clone());
                    write(&dir.join(format!("t{:03}.json", k + 1)), &d.to_json())?;
                }
            }
            if prop.trace.diverged {
                eprintln!("warning: error trace exceeded the overflow threshold");
            }
        }
        Cmd::Validate { p, q, n, repeats, rho, seed } => {
            let a = Distribution::from_json(&read(&p)?)?;
            let b = Distribution::from_json(&read(&q)?)?;
            let e = mc_wasserstein(&a, &b, n, repeats, rho, seed)?;
            println!("{}", serde_json::to_string_pretty(&e)?);
        }
        Cmd::Experiment { id, config, out_dir } => {
            let id: ExperimentId = id.parse()?;
            let text = match &config {
                Some(p) => read(p)?,
                None => String::new(),
            };
            let cfg = ExperimentConfig::from_json(&text, Some(id))?;
            let dir = cfg.out_dir.clone().unwrap_or(out_dir);
            let out = experiments::run(&cfg)?;
            for p in out.write(&dir)? {
                eprintln!("wrote {}", p.display());
            }
            for c in &out.checks {
                let status = if c.passed { "ok" } else { "FAILED" };
                eprintln!("check {}: {status} {}", c.name, c.detail);
            }
            return Ok(out.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
