use crate::error::{invalid, Error, Result};
use crate::measures::{Component, Interval};

pub const QUAD_TOL: f64 = 1e-10;
const MAX_SUBDIV: usize = 20_000;
const TRUNC_SIGMAS: f64 = 12.0;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate and its difference from the 7-point Gauss rule.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive integration to QUAD_TOL absolute-or-relative.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    let mut err = 0.0;
    let mut n = 0;
    let whole = gk15(f, a, b).0.abs();
    while let Some((lo, hi)) = stack.pop() {
        n += 1;
        if n > MAX_SUBDIV {
            return Err(Error::Quadrature(MAX_SUBDIV));
        }
        let (v, e) = gk15(f, lo, hi);
        let local_tol = QUAD_TOL * 0.1 * (hi - lo) / (b - a) * whole.max(1.0);
        if e <= local_tol || hi - lo < 1e-12 * (b - a) {
            total += v;
            err += e;
        } else {
            let m = 0.5 * (lo + hi);
            stack.push((m, hi));
            stack.push((lo, m));
        }
    }
    let _ = err;
    Ok(total)
}

/// ∫_iv |x - c|^rho dP(x) by adaptive quadrature. Gaussian tails are cut at
/// 12 sigma; the part between 12 and 40 sigma is integrated separately and
/// added so the truncation error is accounted for.
pub fn quadrature_moment(comp: &Component, iv: Interval, c: f64, rho: f64) -> Result<f64> {
    if !(rho >= 1.0) || !rho.is_finite() {
        return Err(invalid(format!("rho must be finite and >= 1, got {rho}")));
    }
    if iv.width() == 0.0 {
        return Ok(0.0);
    }
    let (a, b, pdf): (f64, f64, Box<dyn Fn(f64) -> f64>) = match *comp {
        Component::Gaussian { mean, std } => {
            let (lo, hi) = (mean - TRUNC_SIGMAS * std, mean + TRUNC_SIGMAS * std);
            let comp = *comp;
            (lo, hi, Box::new(move |x| comp.pdf(x)))
        }
        Component::Uniform { lo, hi } => {
            let comp = *comp;
            (lo, hi, Box::new(move |x| comp.pdf(x)))
        }
    };
    let f = |x: f64| (x - c).abs().powf(rho) * pdf(x);
    let mut pieces = vec![(iv.lo.max(a), iv.hi.min(b))];
    if let Component::Gaussian { mean, std } = *comp {
        let far = 40.0 * std;
        pieces.push((iv.lo.max(mean - far), iv.hi.min(a)));
        pieces.push((iv.lo.max(b), iv.hi.min(mean + far)));
    }
    let mut total = 0.0;
    for (lo, hi) in pieces {
        if lo < hi {
            // split at the kink of |x - c|^rho
            if c > lo && c < hi {
                total += integrate(&f, lo, c)? + integrate(&f, c, hi)?;
            } else {
                total += integrate(&f, lo, hi)?;
            }
        }
    }
    Ok(total)
}
