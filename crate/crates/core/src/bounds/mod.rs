//! Norm linearizations, Algorithm-1 coefficient selection and the certified
//! bounds (ambiguity ball, no ambiguity, Lipschitz shortcut).

pub mod cover;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_rho, invalid, Result};
use crate::funcmodel::{global_lipschitz, induced_norm, range_beta, slope_alpha, FunctionModel};
use crate::measures::{Distribution, Interval, Region};
use crate::quantize::{Quantization, QuantizationOperator};

pub use cover::{partition_cover, product_cover, quantile_cover, DEFAULT_COVER_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Global,
    Local,
}

/// ||f(x) - f(c_k)||^rho <= alpha_k ||x - c_k||^rho + beta_k on the scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormLinearization {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub scope: Scope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityBall {
    pub center: Distribution,
    pub theta: f64,
    pub rho: u32,
}

impl AmbiguityBall {
    pub fn new(center: Distribution, theta: f64, rho: u32) -> Result<Self> {
        check_rho(rho)?;
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(invalid(format!("ball radius must be finite and >= 0, got {theta}")));
        }
        Ok(AmbiguityBall { center, theta, rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Thm4,
    Thm6,
    Lipschitz,
    Linear,
}

/// Coefficients actually used for one location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationTerm {
    pub alpha: f64,
    #[serde(with = "crate::extfloat")]
    pub beta: f64,
    pub prob: f64,
    /// true when the bound uses (0, beta) for this location
    pub uses_beta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "crate::extfloat")]
    pub value: f64,
    pub method: Method,
    pub rho: u32,
    pub theta: f64,
    pub theta_d: f64,
    /// max alpha over the locations that keep their alpha; the dual multiplier
    pub alpha_max: f64,
    /// sum of prob * beta over the locations that use beta
    #[serde(with = "crate::extfloat")]
    pub beta_sum: f64,
    pub lipschitz: f64,
    pub unbounded: bool,
    pub locations: Vec<LocationTerm>,
}

impl BoundReport {
    /// Recomputes `value` from the stored ingredients.
    pub fn recompute(&self) -> f64 {
        let r = self.rho as i32;
        match self.method {
            Method::Thm4 => thm4_value(self.alpha_max, self.theta + self.theta_d, self.beta_sum, self.rho),
            Method::Thm6 => {
                let s: f64 = self
                    .locations
                    .iter()
                    .map(|l| if l.uses_beta { l.prob * l.beta } else { l.alpha })
                    .sum();
                s.powf(1.0 / r as f64)
            }
            Method::Lipschitz | Method::Linear => self.lipschitz * (self.theta + self.theta_d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    /// stop at the first candidate that does not improve
    pub early_stop: bool,
    pub cover_cap: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            early_stop: false,
            cover_cap: DEFAULT_COVER_CAP,
        }
    }
}

fn root(v: f64, rho: u32) -> f64 {
    if rho == 1 {
        v
    } else {
        v.sqrt()
    }
}

fn thm4_value(alpha_max: f64, radius: f64, beta_sum: f64, rho: u32) -> f64 {
    let a = if alpha_max == 0.0 { 0.0 } else { alpha_max * radius.powi(rho as i32) };
    root(a + beta_sum, rho)
}

pub fn bound_lipschitz(theta: f64, theta_d: f64, lipschitz: f64) -> f64 {
    lipschitz * (theta + theta_d)
}

/// Type-(i) coefficient: beta bounding sup ||f(x) - f(c)||^rho on the scope.
pub fn coeff_type_i(f: &FunctionModel, c: &[f64], scope: &[Interval], rho: u32) -> Result<f64> {
    range_beta(f, scope, c, rho)
}

/// Type-(ii) coefficient: alpha from chord-slope matrices anchored at c on
/// each cell of a subpartition of the scope, capped at L^rho.
pub fn coeff_type_ii(f: &FunctionModel, c: &[f64], subpartition: &[Region], rho: u32) -> Result<f64> {
    let l = global_lipschitz(f, rho)?;
    alpha_over(f, c, subpartition, l, rho)
}

fn alpha_over(f: &FunctionModel, c: &[f64], cover: &[Region], l: f64, rho: u32) -> Result<f64> {
    let cap = l.powi(rho as i32);
    let mut best: f64 = 0.0;
    for r in cover {
        best = best.max(slope_alpha(f, r, c, l, rho)?);
        if best >= cap {
            break;
        }
    }
    Ok(best.min(cap))
}

/// Result of the coefficient search over (alpha, beta, prob) triples.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub value: f64,
    pub alpha_max: f64,
    pub beta_sum: f64,
    /// per input location: uses (0, beta)
    pub uses_beta: Vec<bool>,
}

/// Sorts locations by decreasing alpha (ties: smaller beta first) and swaps
/// the first k of them to (0, beta), for k = 0..=N; alpha past the end is 0.
/// Returns the smallest candidate, or the first local minimum when
/// `early_stop` is set.
pub fn algorithm1(coeffs: &[(f64, f64, f64)], radius: f64, rho: u32, early_stop: bool) -> Selection {
    let n = coeffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        coeffs[j].0.total_cmp(&coeffs[i].0).then(coeffs[i].1.total_cmp(&coeffs[j].1))
    });
    let alpha_at = |k: usize| if k < n { coeffs[order[k]].0 } else { 0.0 };
    let mut best = (thm4_value(alpha_at(0), radius, 0.0, rho), 0usize, 0.0);
    let mut b = 0.0;
    for k in 1..=n {
        let (_, beta, p) = coeffs[order[k - 1]];
        b += if p == 0.0 { 0.0 } else { p * beta };
        let w = thm4_value(alpha_at(k), radius, b, rho);
        if w < best.0 {
            best = (w, k, b);
        } else if early_stop && !(w < best.0) {
            break;
        }
        if !b.is_finite() {
            break;
        }
    }
    let mut uses_beta = vec![false; n];
    for &i in &order[..best.1] {
        uses_beta[i] = true;
    }
    Selection {
        value: best.0,
        alpha_max: alpha_at(best.1),
        beta_sum: best.2,
        uses_beta,
    }
}

/// Global-scope coefficients for each cell location: alpha over the cover,
/// beta over R^d. Each is at least its local counterpart on the own cell.
pub fn global_linearization(
    f: &FunctionModel,
    q: &Quantization,
    cover: &[Region],
    rho: u32,
) -> Result<NormLinearization> {
    check_rho(rho)?;
    let l = global_lipschitz(f, rho)?;
    let full = vec![Interval::full(); f.input_dim()];
    let pairs: Result<Vec<(f64, f64)>> = q
        .cells
        .par_iter()
        .map(|c| {
            let a = alpha_over(f, &c.loc, cover, l, rho)?.max(slope_alpha(f, &c.region, &c.loc, l, rho)?);
            let b = range_beta(f, &full, &c.loc, rho)?.max(range_beta(f, &c.region, &c.loc, rho)?);
            Ok((a, b))
        })
        .collect();
    let (alpha, beta) = pairs?.into_iter().unzip();
    Ok(NormLinearization {
        alpha,
        beta,
        scope: Scope::Global,
    })
}

/// Local coefficients on each cell's own region.
pub fn local_linearization(f: &FunctionModel, q: &Quantization, rho: u32) -> Result<NormLinearization> {
    check_rho(rho)?;
    let l = global_lipschitz(f, rho)?;
    let pairs: Result<Vec<(f64, f64)>> = q
        .cells
        .par_iter()
        .map(|c| Ok((slope_alpha(f, &c.region, &c.loc, l, rho)?, range_beta(f, &c.region, &c.loc, rho)?)))
        .collect();
    let (alpha, beta) = pairs?.into_iter().unzip();
    Ok(NormLinearization {
        alpha,
        beta,
        scope: Scope::Local,
    })
}

fn check_model(f: &FunctionModel, q: &Quantization) -> Result<()> {
    if q.dim() != f.input_dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: f.input_dim(),
            got: q.dim(),
        });
    }
    Ok(())
}

/// Ambiguity-ball bound from cells and a global cover.
pub fn thm4_from_cells(
    f: &FunctionModel,
    q: &Quantization,
    cover: &[Region],
    theta: f64,
    opts: BoundOptions,
) -> Result<BoundReport> {
    check_model(f, q)?;
    if !(theta >= 0.0) {
        return Err(invalid("theta must be >= 0"));
    }
    let rho = q.rho;
    let lin = global_linearization(f, q, cover, rho)?;
    let l = global_lipschitz(f, rho)?;
    let theta_d = q.theta_d();
    let coeffs: Vec<(f64, f64, f64)> = q
        .cells
        .iter()
        .enumerate()
        .map(|(k, c)| (lin.alpha[k], lin.beta[k], c.prob))
        .collect();
    let sel = algorithm1(&coeffs, theta + theta_d, rho, opts.early_stop);
    Ok(BoundReport {
        value: sel.value,
        method: Method::Thm4,
        rho,
        theta,
        theta_d,
        alpha_max: sel.alpha_max,
        beta_sum: sel.beta_sum,
        lipschitz: l,
        unbounded: !sel.value.is_finite(),
        locations: coeffs
            .iter()
            .zip(&sel.uses_beta)
            .map(|(&(alpha, beta, prob), &u)| LocationTerm {
                alpha,
                beta,
                prob,
                uses_beta: u,
            })
            .collect(),
    })
}

/// No-ambiguity bound: per cell the cheaper of alpha * moment and prob * beta.
/// In the report, `alpha` of a cell holds alpha_k * moment_k.
pub fn thm6_from_cells(f: &FunctionModel, q: &Quantization) -> Result<BoundReport> {
    check_model(f, q)?;
    let rho = q.rho;
    let lin = local_linearization(f, q, rho)?;
    let l = global_lipschitz(f, rho)?;
    let mut total = 0.0;
    let mut beta_sum = 0.0;
    let mut alpha_max: f64 = 0.0;
    let mut locations = Vec::with_capacity(q.cells.len());
    for (k, c) in q.cells.iter().enumerate() {
        let a = if c.moment == 0.0 { 0.0 } else { lin.alpha[k] * c.moment };
        let b = if c.prob == 0.0 { 0.0 } else { c.prob * lin.beta[k] };
        let uses_beta = b < a;
        if uses_beta {
            beta_sum += b;
            total += b;
        } else {
            alpha_max = alpha_max.max(lin.alpha[k]);
            total += a;
        }
        locations.push(LocationTerm {
            alpha: a,
            beta: lin.beta[k],
            prob: c.prob,
            uses_beta,
        });
    }
    let value = root(total, rho);
    Ok(BoundReport {
        value,
        method: Method::Thm6,
        rho,
        theta: 0.0,
        theta_d: q.theta_d(),
        alpha_max,
        beta_sum,
        lipschitz: l,
        unbounded: !value.is_finite(),
        locations,
    })
}

/// Lipschitz shortcut; tagged `linear` when f is a single affine map, whose
/// induced norm is then used.
pub fn lipschitz_report(f: &FunctionModel, theta: f64, theta_d: f64, rho: u32) -> Result<BoundReport> {
    let (l, method) = match f.as_affine() {
        Some((a, _)) => (induced_norm(a, rho)?, Method::Linear),
        None => (global_lipschitz(f, rho)?, Method::Lipschitz),
    };
    let value = bound_lipschitz(theta, theta_d, l);
    Ok(BoundReport {
        value,
        method,
        rho,
        theta,
        theta_d,
        alpha_max: l.powi(rho as i32),
        beta_sum: 0.0,
        lipschitz: l,
        unbounded: !value.is_finite(),
        locations: Vec::new(),
    })
}

/// Ambiguity-ball bound for an operator applied to p; the global cover is
/// the operator's partition coarsened to at most `opts.cover_cap` cells.
pub fn bound_thm4(
    q: &QuantizationOperator,
    p: &Distribution,
    theta: f64,
    f: &FunctionModel,
    rho: u32,
    opts: BoundOptions,
) -> Result<BoundReport> {
    let cells = q.cells(p, rho)?;
    let cover = partition_cover(q.partition(), opts.cover_cap);
    thm4_from_cells(f, &cells, &cover, theta, opts)
}

pub fn bound_thm6(q: &QuantizationOperator, p: &Distribution, f: &FunctionModel, rho: u32) -> Result<BoundReport> {
    let cells = q.cells(p, rho)?;
    thm6_from_cells(f, &cells)
}

pub fn bound_with_lipschitz(
    q: &QuantizationOperator,
    p: &Distribution,
    theta: f64,
    f: &FunctionModel,
    rho: u32,
) -> Result<BoundReport> {
    let theta_d = q.theta_d(p, rho)?;
    lipschitz_report(f, theta, theta_d, rho)
}
