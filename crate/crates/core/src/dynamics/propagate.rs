use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::system::StochasticSystem;
use crate::bounds::{
    lipschitz_report, partition_cover, product_cover, quantile_cover, thm4_from_cells, thm6_from_cells, BoundOptions,
    BoundReport, Method,
};
use crate::error::{check_rho, invalid, Error, Result};
use crate::funcmodel::global_lipschitz;
use crate::measures::{Atom, DiscreteDistribution, Distribution, Region};
use crate::quantize::{cluster_cells, optimized_grid, Cell, Quantization};

/// Target on the per-step quantization error theta_d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonPolicy {
    /// the error reached at the first step
    FirstStep,
    Fixed(f64),
    /// fixed budgets, no growth
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    /// state locations per step (K)
    pub state_budget: usize,
    /// noise locations (M)
    pub noise_budget: usize,
    pub epsilon: EpsilonPolicy,
    /// cap on the doubling of the state budget
    pub max_growth: usize,
    pub rho: u32,
    pub seed: u64,
    /// cells of the global cover for separable state maps
    pub cover_cap: usize,
    /// cells of the state and noise factors of the joint cover
    pub joint_state_cover: usize,
    pub joint_noise_cover: usize,
    /// initial ambiguity radius around the initial law
    pub theta0: f64,
    /// ambiguity radius around the noise law
    pub theta_omega: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            state_budget: 100,
            noise_budget: 25,
            epsilon: EpsilonPolicy::FirstStep,
            max_growth: 16,
            rho: 2,
            seed: 0,
            cover_cap: 256,
            joint_state_cover: 16,
            joint_noise_cover: 4,
            theta0: 0.0,
            theta_omega: 0.0,
        }
    }
}

impl PropagationConfig {
    fn check(&self) -> Result<()> {
        check_rho(self.rho)?;
        if self.state_budget == 0 || self.noise_budget == 0 || self.max_growth == 0 {
            return Err(invalid("budgets must be at least 1"));
        }
        if !(self.theta0 >= 0.0) || !(self.theta_omega >= 0.0) {
            return Err(invalid("ambiguity radii must be >= 0"));
        }
        if let EpsilonPolicy::Fixed(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(invalid("epsilon must be > 0"));
            }
        }
        Ok(())
    }
}

/// One step of the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: DiscreteDistribution,
    /// bound on the state part (separable) or on the joint map
    pub report: BoundReport,
    /// noise part of a separable step, zero otherwise
    pub noise_bound: f64,
    /// certified W_rho bound for the next state
    pub theta_next: f64,
    pub theta_d: f64,
    pub theta_state: f64,
    pub theta_noise: f64,
    pub clusters: usize,
}

/// Per-step trace row; row t describes the step from t-1 to t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub theta: f64,
    pub theta_lipschitz: f64,
    pub theta_d: f64,
    pub theta_state: f64,
    pub theta_noise: f64,
    pub state_bound: f64,
    pub noise_bound: f64,
    pub method: Method,
    pub alpha_max: f64,
    pub beta_sum: f64,
    pub clusters: usize,
    pub support: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTrace {
    pub rho: u32,
    pub epsilon: Option<f64>,
    pub records: Vec<StepRecord>,
    pub diverged: bool,
}

impl ErrorTrace {
    pub fn thetas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.theta).collect()
    }

    pub fn lipschitz_thetas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.theta_lipschitz).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub trace: ErrorTrace,
    /// approximate laws at t = 1..=T
    pub states: Vec<DiscreteDistribution>,
}

fn combine_err(a: f64, b: f64, rho: u32) -> f64 {
    if rho == 1 {
        a + b
    } else {
        (a * a + b * b).sqrt()
    }
}

/// Cells of state x noise with additive moments.
fn joint_cells(s: &Quantization, n: &Quantization) -> Quantization {
    let mut cells = Vec::with_capacity(s.cells.len() * n.cells.len());
    for a in &s.cells {
        for b in &n.cells {
            let mut loc = a.loc.clone();
            loc.extend_from_slice(&b.loc);
            let mut region = a.region.clone();
            region.extend(b.region.iter().cloned());
            cells.push(Cell {
                loc,
                prob: a.prob * b.prob,
                moment: b.prob * a.moment + a.prob * b.moment,
                region,
            });
        }
    }
    Quantization { cells, rho: s.rho }
}

struct NoisePart {
    cells: Quantization,
    cover: Vec<Region>,
    theta: f64,
    /// separable only: bound on the noise map's pushforward error
    bound: f64,
    lipschitz: f64,
}

fn noise_part(sys: &StochasticSystem, cfg: &PropagationConfig) -> Result<NoisePart> {
    let grid = optimized_grid(&sys.noise, cfg.noise_budget);
    let p = Distribution::Product(sys.noise.clone());
    let cells = grid.cells(&p, cfg.rho)?.without_empty();
    let theta = cells.theta_d();
    let cover = partition_cover(grid.partition(), cfg.joint_noise_cover);
    let (bound, lipschitz) = match &sys.separable {
        Some(sep) => {
            let l = global_lipschitz(&sep.noise_map, cfg.rho)?;
            let b = if cfg.theta_omega > 0.0 {
                let full = partition_cover(grid.partition(), cfg.cover_cap);
                thm4_from_cells(&sep.noise_map, &cells, &full, cfg.theta_omega, BoundOptions::default())?.value
            } else {
                thm6_from_cells(&sep.noise_map, &cells)?.value
            };
            (b, l)
        }
        None => (0.0, 0.0),
    };
    Ok(NoisePart {
        cells,
        cover,
        theta,
        bound,
        lipschitz,
    })
}

struct StateCells {
    cells: Quantization,
    /// cover for separable maps and factor for the joint cover
    cover: Vec<Region>,
    joint_cover: Vec<Region>,
}

fn state_cells(state: &Distribution, k: usize, seed: u64, cfg: &PropagationConfig) -> Result<StateCells> {
    match state {
        Distribution::Product(p) => {
            let grid = optimized_grid(p, k);
            Ok(StateCells {
                cells: grid.cells(state, cfg.rho)?.without_empty(),
                cover: partition_cover(grid.partition(), cfg.cover_cap),
                joint_cover: partition_cover(grid.partition(), cfg.joint_state_cover),
            })
        }
        Distribution::Discrete(d) => Ok(StateCells {
            cells: cluster_cells(d, k, seed, cfg.rho)?.without_empty(),
            cover: quantile_cover(state, cfg.cover_cap),
            joint_cover: quantile_cover(state, cfg.joint_state_cover),
        }),
    }
}

fn push_atoms(sys: &StochasticSystem, s: &Quantization, n: &Quantization) -> Result<DiscreteDistribution> {
    let atoms: Vec<Atom> = s
        .cells
        .par_iter()
        .flat_map_iter(|a| {
            n.cells.iter().filter(move |b| a.prob * b.prob > 0.0).map(move |b| Atom {
                loc: sys.step_point(&a.loc, &b.loc),
                w: a.prob * b.prob,
            })
        })
        .collect();
    Ok(DiscreteDistribution::from_weighted(atoms)?.merge_duplicates())
}

fn step_with(
    sys: &StochasticSystem,
    state: &Distribution,
    theta_t: f64,
    k: usize,
    seed: u64,
    noise: &NoisePart,
    cfg: &PropagationConfig,
) -> Result<StepOutcome> {
    let sc = state_cells(state, k, seed, cfg)?;
    let theta_state = sc.cells.theta_d();
    let theta_d = combine_err(theta_state, noise.theta, cfg.rho);
    let opts = BoundOptions {
        early_stop: false,
        cover_cap: cfg.cover_cap,
    };
    let next = push_atoms(sys, &sc.cells, &noise.cells)?;
    let (report, noise_bound) = match &sys.separable {
        Some(sep) => {
            let r = if theta_t == 0.0 {
                thm6_from_cells(&sep.state_map, &sc.cells)?
            } else {
                thm4_from_cells(&sep.state_map, &sc.cells, &sc.cover, theta_t, opts)?
            };
            (r, noise.bound)
        }
        None => {
            let joint = joint_cells(&sc.cells, &noise.cells);
            let radius = theta_t + cfg.theta_omega;
            let r = if radius == 0.0 {
                thm6_from_cells(&sys.dynamics, &joint)?
            } else {
                let cover = product_cover(&sc.joint_cover, &noise.cover);
                thm4_from_cells(&sys.dynamics, &joint, &cover, radius, opts)?
            };
            (r, 0.0)
        }
    };
    Ok(StepOutcome {
        next,
        theta_next: report.value + noise_bound,
        report,
        noise_bound,
        theta_d,
        theta_state,
        theta_noise: noise.theta,
        clusters: sc.cells.cells.len(),
    })
}

/// One step from an approximate state law `state_hat` (the exact initial
/// law at t = 0) that is within `theta_t` of the true one.
pub fn propagate_step(
    sys: &StochasticSystem,
    state_hat: &Distribution,
    theta_t: f64,
    cfg: &PropagationConfig,
) -> Result<StepOutcome> {
    cfg.check()?;
    let noise = noise_part(sys, cfg)?;
    step_with(sys, state_hat, theta_t, cfg.state_budget, cfg.seed, &noise, cfg)
}

/// Initial radius under an ambiguous start; step 0 uses the ambiguity-ball
/// bound whenever it is positive.
pub fn ambiguous_start(theta0: f64, theta_omega: f64) -> Result<(f64, bool)> {
    if !(theta0 >= 0.0) || !(theta_omega >= 0.0) {
        return Err(invalid("radii must be >= 0"));
    }
    let r = theta0 + theta_omega;
    Ok((r, r > 0.0))
}

/// Threshold beyond which a trace is flagged as diverged.
pub const OVERFLOW: f64 = 1e30;

/// Runs T steps. With an epsilon, the state budget doubles (up to
/// `max_growth` times the base) until the step's quantization error is at
/// most epsilon.
pub fn propagate_horizon(sys: &StochasticSystem, horizon: usize, cfg: &PropagationConfig) -> Result<Propagation> {
    cfg.check()?;
    if horizon == 0 {
        return Err(invalid("horizon must be >= 1"));
    }
    let noise = noise_part(sys, cfg)?;
    let lip_state = match &sys.separable {
        Some(sep) => global_lipschitz(&sep.state_map, cfg.rho)?,
        None => global_lipschitz(&sys.dynamics, cfg.rho)?,
    };
    let mut state = sys.initial.clone();
    let mut theta = cfg.theta0;
    let mut theta_lip = cfg.theta0;
    let mut records = Vec::with_capacity(horizon);
    let mut states = Vec::with_capacity(horizon);
    let mut epsilon = match cfg.epsilon {
        EpsilonPolicy::Fixed(e) => Some(e),
        _ => None,
    };
    let mut diverged = false;
    for t in 0..horizon {
        let start = Instant::now();
        let seed = cfg.seed.wrapping_add(t as u64);
        let mut k = cfg.state_budget;
        let mut out = step_with(sys, &state, theta, k, seed, &noise, cfg)?;
        if t == 0 && cfg.epsilon == EpsilonPolicy::FirstStep {
            epsilon = Some(out.theta_d.max(f64::MIN_POSITIVE));
        }
        if let Some(eps) = epsilon {
            while out.theta_d > eps * (1.0 + 1e-12) && k < cfg.state_budget * cfg.max_growth {
                k = (2 * k).min(cfg.state_budget * cfg.max_growth);
                out = step_with(sys, &state, theta, k, seed, &noise, cfg)?;
            }
            if out.theta_d > eps * (1.0 + 1e-12) {
                return Err(Error::BudgetExhausted {
                    step: t,
                    theta_d: out.theta_d,
                    epsilon: eps,
                });
            }
        }
        theta_lip = match &sys.separable {
            Some(_) => lip_state * (theta_lip + out.theta_state) + noise.lipschitz * (cfg.theta_omega + out.theta_noise),
            None => lip_state * (theta_lip + cfg.theta_omega + out.theta_d),
        };
        theta = out.theta_next;
        if !(theta < OVERFLOW) || !(theta_lip < OVERFLOW) {
            diverged = true;
        }
        records.push(StepRecord {
            t: t + 1,
            theta,
            theta_lipschitz: theta_lip,
            theta_d: out.theta_d,
            theta_state: out.theta_state,
            theta_noise: out.theta_noise,
            state_bound: out.report.value,
            noise_bound: out.noise_bound,
            method: out.report.method,
            alpha_max: out.report.alpha_max,
            beta_sum: out.report.beta_sum,
            clusters: out.clusters,
            support: out.next.len(),
            seconds: start.elapsed().as_secs_f64(),
        });
        state = Distribution::Discrete(out.next.clone());
        states.push(out.next);
    }
    Ok(Propagation {
        trace: ErrorTrace {
            rho: cfg.rho,
            epsilon,
            records,
            diverged,
        },
        states,
    })
}

/// Lipschitz-only report of a step, for comparison columns.
pub fn lipschitz_step(sys: &StochasticSystem, theta_t: f64, theta_d: f64, rho: u32) -> Result<BoundReport> {
    lipschitz_report(&sys.dynamics, theta_t, theta_d, rho)
}
