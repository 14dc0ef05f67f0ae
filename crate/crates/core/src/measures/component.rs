use rand::Rng;
use rand_distr::{Distribution as _, Normal, Uniform as UniformDist};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use super::Interval;
use crate::error::{check_rho, invalid, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(z: f64) -> f64 {
    if z.is_infinite() {
        0.0
    } else {
        INV_SQRT_2PI * (-0.5 * z * z).exp()
    }
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal mass of [za, zb], computed on the tail side to avoid cancellation.
pub fn std_normal_mass(za: f64, zb: f64) -> f64 {
    if za >= zb {
        return 0.0;
    }
    if za >= 0.0 {
        (std_normal_cdf(-za) - std_normal_cdf(-zb)).max(0.0)
    } else if zb <= 0.0 {
        (std_normal_cdf(zb) - std_normal_cdf(za)).max(0.0)
    } else {
        (1.0 - std_normal_cdf(za) - std_normal_cdf(-zb)).max(0.0)
    }
}

/// z * phi(z), zero at infinity.
fn zphi(z: f64) -> f64 {
    if z.is_infinite() {
        0.0
    } else {
        z * std_normal_pdf(z)
    }
}

/// Integral of |z - delta|^rho phi(z) over [za, zb] for the standard normal.
fn std_normal_moment(za: f64, zb: f64, delta: f64, rho: u32) -> f64 {
    if za >= zb {
        return 0.0;
    }
    match rho {
        2 => {
            // (1 + d^2) P + (za - 2d) phi(za) - (zb - 2d) phi(zb)
            let p = std_normal_mass(za, zb);
            let pa = std_normal_pdf(za);
            let pb = std_normal_pdf(zb);
            let v = (1.0 + delta * delta) * p + zphi(za) - zphi(zb) - 2.0 * delta * (pa - pb);
            v.max(0.0)
        }
        _ => {
            // above delta: phi(lo) - phi(hi) - d P; below: d P - (phi(lo) - phi(hi))
            let mut v = 0.0;
            let lo = za.max(delta);
            if lo < zb {
                v += std_normal_pdf(lo) - std_normal_pdf(zb) - delta * std_normal_mass(lo, zb);
            }
            let hi = zb.min(delta);
            if za < hi {
                v += delta * std_normal_mass(za, hi) - (std_normal_pdf(za) - std_normal_pdf(hi));
            }
            v.max(0.0)
        }
    }
}

/// One-dimensional factor of a product distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Component {
    Gaussian { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Component {
    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        let c = Component::Gaussian { mean, std };
        c.validate()?;
        Ok(c)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let c = Component::Uniform { lo, hi };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Component::Gaussian { mean, std } => {
                if !mean.is_finite() || !(std > 0.0 && std.is_finite()) {
                    return Err(invalid(format!("gaussian needs finite mean and std > 0, got ({mean}, {std})")));
                }
            }
            Component::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(invalid(format!("uniform needs finite lo < hi, got ({lo}, {hi})")));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Component::Gaussian { mean, .. } => mean,
            Component::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Component::Gaussian { std, .. } => std * std,
            Component::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
        }
    }

    /// Support of the component.
    pub fn support(&self) -> Interval {
        match *self {
            Component::Gaussian { .. } => Interval::full(),
            Component::Uniform { lo, hi } => Interval { lo, hi },
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => std_normal_cdf((x - mean) / std),
            Component::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => std_normal_pdf((x - mean) / std) / std,
            Component::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => {
                if p <= 0.0 {
                    f64::NEG_INFINITY
                } else if p >= 1.0 {
                    f64::INFINITY
                } else {
                    let mut z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
                    // erfc_inv is only accurate to a few ulps times 1e3; polish with Newton
                    for _ in 0..2 {
                        let f = if p < 0.5 {
                            std_normal_cdf(z) - p
                        } else {
                            (1.0 - p) - std_normal_cdf(-z)
                        };
                        let d = std_normal_pdf(z);
                        if d > 0.0 {
                            z -= f / d;
                        }
                    }
                    mean + std * z
                }
            }
            Component::Uniform { lo, hi } => lo + p.clamp(0.0, 1.0) * (hi - lo),
        }
    }

    /// Probability mass of the interval.
    pub fn prob(&self, iv: &Interval) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => {
                std_normal_mass((iv.lo - mean) / std, (iv.hi - mean) / std)
            }
            Component::Uniform { lo, hi } => {
                let a = iv.lo.max(lo);
                let b = iv.hi.min(hi);
                if b > a {
                    (b - a) / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    /// Integral of |x - c|^rho over `iv` with respect to this component.
    pub fn truncated_moment(&self, iv: &Interval, c: f64, rho: u32) -> Result<f64> {
        check_rho(rho)?;
        Ok(self.truncated_moment_unchecked(iv, c, rho))
    }

    pub(crate) fn truncated_moment_unchecked(&self, iv: &Interval, c: f64, rho: u32) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => {
                let za = (iv.lo - mean) / std;
                let zb = (iv.hi - mean) / std;
                let delta = (c - mean) / std;
                std.powi(rho as i32) * std_normal_moment(za, zb, delta, rho)
            }
            Component::Uniform { lo, hi } => {
                let a = iv.lo.max(lo);
                let b = iv.hi.min(hi);
                if b <= a {
                    return 0.0;
                }
                let r = rho as i32;
                let anti = |x: f64| {
                    let u = x - c;
                    u.signum() * u.abs().powi(r + 1) / (r as f64 + 1.0)
                };
                ((anti(b) - anti(a)) / (hi - lo)).max(0.0)
            }
        }
    }

    /// Conditional mean on the interval; falls back to the clipped interval
    /// center when the interval carries no numerically visible mass.
    pub fn conditional_mean(&self, iv: &Interval) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => {
                let za = (iv.lo - mean) / std;
                let zb = (iv.hi - mean) / std;
                let p = std_normal_mass(za, zb);
                if p > 1e-300 {
                    let m = mean + std * (std_normal_pdf(za) - std_normal_pdf(zb)) / p;
                    m.clamp(iv.lo, iv.hi)
                } else if iv.lo.is_finite() && iv.hi.is_finite() {
                    0.5 * (iv.lo + iv.hi)
                } else if iv.lo.is_finite() {
                    iv.lo
                } else {
                    iv.hi
                }
            }
            Component::Uniform { lo, hi } => {
                let a = iv.lo.max(lo);
                let b = iv.hi.min(hi);
                if b > a {
                    0.5 * (a + b)
                } else {
                    iv.center().clamp(lo, hi)
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Component::Gaussian { mean, std } => Normal::new(mean, std)
                .expect("validated std")
                .sample(rng),
            Component::Uniform { lo, hi } => UniformDist::new(lo, hi)
                .expect("validated bounds")
                .sample(rng),
        }
    }
}
