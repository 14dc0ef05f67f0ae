mod propagate;
mod system;

pub use propagate::{
    ambiguous_start, lipschitz_step, propagate_horizon, propagate_step, EpsilonPolicy, ErrorTrace, Propagation,
    PropagationConfig, StepOutcome, StepRecord, OVERFLOW,
};
pub use system::*;

use crate::error::{check_rho, invalid, Result};

/// Output of [`error_recursion`].
#[derive(Debug, Clone, PartialEq)]
pub struct Recursion {
    pub thetas: Vec<f64>,
    pub diverged: bool,
}

/// theta_{t+1} = (alpha_t (theta_t + eps)^rho + beta_t)^(1/rho), starting
/// from theta_1. `beta_seq` holds the already summed beta terms.
pub fn error_recursion(alpha_seq: &[f64], beta_seq: &[f64], theta1: f64, epsilon: f64, rho: u32) -> Result<Recursion> {
    check_rho(rho)?;
    if alpha_seq.len() != beta_seq.len() {
        return Err(invalid("alpha and beta sequences differ in length"));
    }
    let r = rho as f64;
    let mut thetas = vec![theta1];
    let mut diverged = !(theta1 < OVERFLOW);
    let mut th = theta1;
    for (&a, &b) in alpha_seq.iter().zip(beta_seq) {
        th = (a * (th + epsilon).powf(r) + b).powf(1.0 / r);
        if !(th < OVERFLOW) {
            diverged = true;
        }
        thetas.push(th);
    }
    Ok(Recursion { thetas, diverged })
}

/// Limit L/(1-L) eps of the recursion for contractive dynamics.
pub fn fixed_point_bound(lipschitz: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lipschitz) {
        return Err(invalid(format!("fixed point needs 0 <= L < 1, got {lipschitz}")));
    }
    Ok(lipschitz / (1.0 - lipschitz) * epsilon)
}

/// Step bound of a separable system: the two pushforward errors add.
pub fn separable_step_bound(sys: &StochasticSystem, state_bound: f64, noise_bound: f64) -> Result<f64> {
    if sys.separable.is_none() {
        return Err(invalid(format!("system {} has no separable form", sys.name)));
    }
    Ok(state_bound + noise_bound)
}
