use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcmodel::{self, FunctionModel, ModelBuilder};
use crate::measures::{Distribution, ProductDistribution};

/// f(x, w) = g(x) + s(w).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separable {
    pub state_map: FunctionModel,
    pub noise_map: FunctionModel,
}

/// x_{t+1} = f(x_t, w_t) with i.i.d. noise w_t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticSystem {
    pub name: String,
    /// on the stacked input (x, w)
    pub dynamics: FunctionModel,
    pub noise: ProductDistribution,
    pub initial: Distribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separable: Option<Separable>,
}

/// The model (x, w) -> g(x) + s(w).
pub fn compose_separable(g: &FunctionModel, s: &FunctionModel) -> Result<FunctionModel> {
    let d = g.input_dim();
    let q = s.input_dim();
    if g.output_dim() != d || s.output_dim() != d {
        return Err(invalid("separable maps must both return the state dimension"));
    }
    let mut b = ModelBuilder::new(d + q);
    let x = b.select(ModelBuilder::INPUT, (0..d).collect());
    let w = b.select(ModelBuilder::INPUT, (d..d + q).collect());
    let gx = b.embed(g, x);
    let sw = b.embed(s, w);
    let out = b.sum(vec![gx, sw]);
    b.build(out)
}

fn identity_map(d: usize) -> FunctionModel {
    let mut b = ModelBuilder::new(d);
    let n = b.scale(ModelBuilder::INPUT, vec![1.0; d]);
    b.build(n).expect("identity")
}

impl StochasticSystem {
    pub fn new(
        name: impl Into<String>,
        dynamics: FunctionModel,
        noise: ProductDistribution,
        initial: Distribution,
        separable: Option<Separable>,
    ) -> Result<Self> {
        let sys = StochasticSystem {
            name: name.into(),
            dynamics,
            noise,
            initial,
            separable,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Separable system from g and s.
    pub fn separable(
        name: impl Into<String>,
        state_map: FunctionModel,
        noise_map: FunctionModel,
        noise: ProductDistribution,
        initial: Distribution,
    ) -> Result<Self> {
        let dynamics = compose_separable(&state_map, &noise_map)?;
        Self::new(
            name,
            dynamics,
            noise,
            initial,
            Some(Separable {
                state_map,
                noise_map,
            }),
        )
    }

    /// Additive noise: f(x, w) = g(x) + w.
    pub fn additive(name: impl Into<String>, g: FunctionModel, noise: ProductDistribution, initial: Distribution) -> Result<Self> {
        let s = identity_map(g.output_dim());
        Self::separable(name, g, s, noise, initial)
    }

    pub fn state_dim(&self) -> usize {
        self.dynamics.output_dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.noise.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.state_dim();
        let q = self.noise_dim();
        if self.dynamics.input_dim() != d + q {
            return Err(Error::DimensionMismatch {
                expected: d + q,
                got: self.dynamics.input_dim(),
            });
        }
        if self.initial.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.initial.dim(),
            });
        }
        if let Some(sep) = &self.separable {
            let ok_dims = sep.state_map.input_dim() == d
                && sep.state_map.output_dim() == d
                && sep.noise_map.input_dim() == q
                && sep.noise_map.output_dim() == d;
            if !ok_dims {
                return Err(invalid("separable form has the wrong shape"));
            }
            let xs = self.initial.sample(1000, 0xA5A5);
            let ws = self.noise.sample(1000, 0x5A5A);
            for (x, w) in xs.iter().zip(&ws) {
                let mut xw = x.clone();
                xw.extend_from_slice(w);
                let full = self.dynamics.eval_unchecked(&xw);
                let g = sep.state_map.eval_unchecked(x);
                let s = sep.noise_map.eval_unchecked(w);
                for i in 0..d {
                    if (full[i] - g[i] - s[i]).abs() > 1e-12 * (1.0 + full[i].abs()) {
                        return Err(invalid("separable form disagrees with the dynamics"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn step_point(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let mut xw = x.to_vec();
        xw.extend_from_slice(w);
        self.dynamics.eval_unchecked(&xw)
    }

    /// States of n independent trajectories at each requested time (sorted,
    /// time 0 is the initial draw). Trajectory i uses its own noise stream.
    pub fn simulate(&self, n: usize, times: &[usize], seed: u64) -> Vec<Vec<Vec<f64>>> {
        let horizon = times.iter().copied().max().unwrap_or(0);
        let x0 = self.initial.sample(n, seed);
        let per_traj: Vec<Vec<Vec<f64>>> = x0
            .into_par_iter()
            .enumerate()
            .map(|(i, mut x)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0DDB_1A5E_5BAD_5EED);
                rng.set_stream(i as u64 + 1);
                let mut out = Vec::with_capacity(times.len());
                for t in 0..=horizon {
                    if times.contains(&t) {
                        out.push(x.clone());
                    }
                    if t < horizon {
                        let w = self.noise.sample_with(&mut rng);
                        x = self.step_point(&x, &w);
                    }
                }
                out
            })
            .collect();
        let mut sorted: Vec<usize> = times.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        (0..sorted.len())
            .map(|k| per_traj.iter().map(|tr| tr[k].clone()).collect())
            .collect()
    }
}

pub const SYSTEM_NAMES: [&str; 4] = ["mountain_car", "quadruple_tank", "dubins_car", "nn_dynamics_3d"];

fn gaussian(mean: &[f64], var: &[f64]) -> ProductDistribution {
    ProductDistribution::diag_gaussian(mean, var).expect("valid parameters")
}

/// Benchmark systems. Additive-noise systems use N(0, 1e-2 I) noise; the
/// 3-D network is sigma(A x + B w).
pub fn builtin_system(name: &str) -> Result<StochasticSystem> {
    let p = serde_json::Value::Null;
    match name {
        "mountain_car" | "quadruple_tank" | "dubins_car" => {
            let g = funcmodel::builtin(name, &p)?;
            let d = g.input_dim();
            let initial = funcmodel::benchmark_distribution(name, &p)?;
            StochasticSystem::additive(name, g, gaussian(&vec![0.0; d], &vec![1e-2; d]), Distribution::Product(initial))
        }
        "nn_dynamics_3d" => StochasticSystem::new(
            name,
            funcmodel::nn_dynamics_3d(),
            gaussian(&[0.0; 3], &[0.1, 0.1, 0.01]),
            Distribution::Product(gaussian(&[1.5, -1.2, 2.4], &[0.1, 0.5, 0.2])),
            None,
        ),
        other => Err(invalid(format!("unknown system {other:?}"))),
    }
}

/// JSON system description: either `{"builtin": name}` or an explicit
/// system, with optional overrides of the noise and initial laws.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        noise: Option<ProductDistribution>,
        #[serde(default)]
        initial: Option<Distribution>,
    },
    Separable {
        state_map: FunctionModel,
        noise_map: FunctionModel,
        noise: ProductDistribution,
        initial: Distribution,
        #[serde(default)]
        name: Option<String>,
    },
    Explicit {
        dynamics: FunctionModel,
        noise: ProductDistribution,
        initial: Distribution,
        #[serde(default)]
        name: Option<String>,
    },
}

impl SystemSpec {
    pub fn build(self) -> Result<StochasticSystem> {
        match self {
            SystemSpec::Builtin { builtin, noise, initial } => {
                let mut s = builtin_system(&builtin)?;
                if let Some(n) = noise {
                    s.noise = n;
                }
                if let Some(i) = initial {
                    s.initial = i.validated()?;
                }
                s.validate()?;
                Ok(s)
            }
            SystemSpec::Separable {
                state_map,
                noise_map,
                noise,
                initial,
                name,
            } => StochasticSystem::separable(name.unwrap_or_else(|| "custom".into()), state_map, noise_map, noise, initial.validated()?),
            SystemSpec::Explicit {
                dynamics,
                noise,
                initial,
                name,
            } => StochasticSystem::new(name.unwrap_or_else(|| "custom".into()), dynamics, noise, initial.validated()?, None),
        }
    }

    pub fn from_json(s: &str) -> Result<StochasticSystem> {
        let spec: SystemSpec = serde_json::from_str(s)?;
        spec.build()
    }
}
