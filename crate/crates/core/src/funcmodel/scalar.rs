//! Scalar primitives applied elementwise, with the per-primitive facts the
//! bound propagation needs: exact range, derivative range, chord slopes from an
//! anchor, and parallel-line relaxations.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::measures::Interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Clamp(f64, f64),
    Sigmoid,
    Sin,
    Cos,
    Scale(f64),
}

pub fn sigmoid(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

fn sigmoid_deriv(y: f64) -> f64 {
    let s = sigmoid(y);
    s * (1.0 - s)
}

/// Points t0 + k * period inside [lo, hi].
fn periodic_points(t0: f64, period: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let k0 = ((lo - t0) / period).ceil();
    let mut t = t0 + k0 * period;
    while t <= hi {
        if t >= lo {
            out.push(t);
        }
        t += period;
    }
}

/// Product of a point value and an interval, with 0 * inf = 0.
pub fn scale_interval(a: f64, iv: Interval) -> Interval {
    if a == 0.0 {
        return Interval::point(0.0);
    }
    let x = a * iv.lo;
    let y = a * iv.hi;
    if a > 0.0 {
        Interval { lo: x, hi: y }
    } else {
        Interval { lo: y, hi: x }
    }
}

/// Product of two intervals with finite endpoints or 0 * inf = 0.
pub fn mul_interval(a: Interval, b: Interval) -> Interval {
    let m = |x: f64, y: f64| if x == 0.0 || y == 0.0 { 0.0 } else { x * y };
    let c = [m(a.lo, b.lo), m(a.lo, b.hi), m(a.hi, b.lo), m(a.hi, b.hi)];
    Interval {
        lo: c.iter().cloned().fold(f64::INFINITY, f64::min),
        hi: c.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// n / d for an interval d of constant sign not touching zero.
fn div_interval(n: Interval, d: Interval) -> Interval {
    let q = |x: f64, y: f64| if y.is_infinite() { 0.0 } else { x / y };
    let c = [q(n.lo, d.lo), q(n.lo, d.hi), q(n.hi, d.lo), q(n.hi, d.hi)];
    Interval {
        lo: c.iter().cloned().fold(f64::INFINITY, f64::min),
        hi: c.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

const CHORD_PIECES: usize = 128;
const CHORD_WINDOW: f64 = 8.0;

impl Scalar {
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            Scalar::Clamp(lo, hi) => y.clamp(lo, hi),
            Scalar::Sigmoid => sigmoid(y),
            Scalar::Sin => y.sin(),
            Scalar::Cos => y.cos(),
            Scalar::Scale(s) => s * y,
        }
    }

    /// Bound on |g'| over the real line.
    pub fn global_slope(&self) -> f64 {
        match *self {
            Scalar::Clamp(..) => 1.0,
            Scalar::Sigmoid => 0.25,
            Scalar::Sin | Scalar::Cos => 1.0,
            Scalar::Scale(s) => s.abs(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Scalar::Scale(s) if *s != 0.0)
    }

    /// Exact image of an interval.
    pub fn range(&self, y: Interval) -> Interval {
        match *self {
            Scalar::Clamp(lo, hi) => Interval {
                lo: y.lo.clamp(lo, hi),
                hi: y.hi.clamp(lo, hi),
            },
            Scalar::Sigmoid => Interval {
                lo: if y.lo == f64::NEG_INFINITY { 0.0 } else { sigmoid(y.lo) },
                hi: if y.hi == f64::INFINITY { 1.0 } else { sigmoid(y.hi) },
            },
            Scalar::Sin | Scalar::Cos => {
                if !y.is_bounded() || y.width() >= TAU {
                    return Interval { lo: -1.0, hi: 1.0 };
                }
                let mut pts = vec![y.lo, y.hi];
                periodic_points(FRAC_PI_2, PI, y.lo, y.hi, &mut pts);
                if matches!(self, Scalar::Cos) {
                    pts.clear();
                    pts.extend([y.lo, y.hi]);
                    periodic_points(0.0, PI, y.lo, y.hi, &mut pts);
                }
                let vals = pts.iter().map(|&t| self.eval(t));
                let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                Interval { lo: lo.max(-1.0), hi: hi.min(1.0) }
            }
            Scalar::Scale(s) => scale_interval(s, y),
        }
    }

    /// Range of g' over an interval.
    pub fn deriv_range(&self, y: Interval) -> Interval {
        match *self {
            Scalar::Clamp(lo, hi) => {
                if lo <= y.lo && y.hi <= hi {
                    Interval::point(1.0)
                } else if y.hi <= lo || y.lo >= hi {
                    Interval::point(0.0)
                } else {
                    Interval { lo: 0.0, hi: 1.0 }
                }
            }
            Scalar::Sigmoid => {
                let at = |t: f64| if t.is_infinite() { 0.0 } else { sigmoid_deriv(t) };
                let (a, b) = (at(y.lo), at(y.hi));
                if y.contains(0.0) {
                    Interval { lo: a.min(b), hi: 0.25 }
                } else {
                    Interval { lo: a.min(b), hi: a.max(b) }
                }
            }
            Scalar::Sin => Scalar::Cos.range(y),
            Scalar::Cos => {
                let r = Scalar::Sin.range(y);
                Interval { lo: -r.hi, hi: -r.lo }
            }
            Scalar::Scale(s) => Interval::point(s),
        }
    }

    /// Hull of (g(y) - g(y0)) / (y - y0) over y in `y` (and g'(y0) when y0 is
    /// in `y`). Pieces away from y0 use interval division, every piece is also
    /// bounded by the derivative range between it and y0.
    pub fn chord_range(&self, y0: f64, y: Interval) -> Interval {
        if let Scalar::Scale(s) = *self {
            return Interval::point(s);
        }
        let g0 = self.eval(y0);
        let a = if y.lo.is_finite() { y.lo } else { y.hi.min(y0) - CHORD_WINDOW };
        let b = if y.hi.is_finite() { y.hi } else { y.lo.max(y0) + CHORD_WINDOW };
        let mut cuts: Vec<f64> = (0..=CHORD_PIECES)
            .map(|i| a + (b - a) * i as f64 / CHORD_PIECES as f64)
            .collect();
        if y0 > a && y0 < b {
            cuts.push(y0);
            cuts.sort_by(f64::total_cmp);
        }
        let mut pieces: Vec<Interval> = cuts
            .windows(2)
            .map(|w| Interval { lo: w[0], hi: w[1] })
            .collect();
        if y.lo == f64::NEG_INFINITY {
            pieces.push(Interval { lo: f64::NEG_INFINITY, hi: a });
        }
        if y.hi == f64::INFINITY {
            pieces.push(Interval { lo: b, hi: f64::INFINITY });
        }
        if pieces.is_empty() {
            pieces.push(y);
        }
        let mut out: Option<Interval> = None;
        for p in pieces {
            let hull = p.hull(&Interval::point(y0));
            let mut s = self.deriv_range(hull);
            if p.lo > y0 || p.hi < y0 {
                let num = self.range(p);
                let num = Interval { lo: num.lo - g0, hi: num.hi - g0 };
                let den = Interval { lo: p.lo - y0, hi: p.hi - y0 };
                let q = div_interval(num, den);
                s = Interval { lo: s.lo.max(q.lo), hi: s.hi.min(q.hi) };
                if s.lo > s.hi {
                    // rounding; keep the always-valid derivative bound
                    s = self.deriv_range(hull);
                }
            }
            out = Some(match out {
                None => s,
                Some(o) => o.hull(&s),
            });
        }
        out.expect("at least one piece")
    }

    /// Parallel lines a*y + lo <= g(y) <= a*y + hi over `y`.
    pub fn relax(&self, y: Interval) -> (f64, f64, f64) {
        if let Scalar::Scale(s) = *self {
            return (s, 0.0, 0.0);
        }
        if !y.is_bounded() || (matches!(self, Scalar::Sin | Scalar::Cos) && y.width() > 16.0 * TAU) {
            let r = self.range(y);
            return (0.0, r.lo, r.hi);
        }
        if y.width() == 0.0 {
            let v = self.eval(y.lo);
            return (0.0, v, v);
        }
        let a = (self.eval(y.hi) - self.eval(y.lo)) / y.width();
        let mut pts = vec![y.lo, y.hi];
        match *self {
            Scalar::Clamp(lo, hi) => {
                for k in [lo, hi] {
                    if y.contains(k) {
                        pts.push(k);
                    }
                }
            }
            Scalar::Sigmoid => {
                if a > 0.0 && a < 0.25 {
                    let r = (1.0 - 4.0 * a).sqrt();
                    for s in [(1.0 - r) / 2.0, (1.0 + r) / 2.0] {
                        let t = (s / (1.0 - s)).ln();
                        if y.contains(t) {
                            pts.push(t);
                        }
                    }
                } else if a >= 0.25 && y.contains(0.0) {
                    pts.push(0.0);
                }
            }
            Scalar::Sin => {
                let t = a.clamp(-1.0, 1.0).acos();
                periodic_points(t, TAU, y.lo, y.hi, &mut pts);
                periodic_points(-t, TAU, y.lo, y.hi, &mut pts);
            }
            Scalar::Cos => {
                let t = (-a).clamp(-1.0, 1.0).asin();
                periodic_points(t, TAU, y.lo, y.hi, &mut pts);
                periodic_points(PI - t, TAU, y.lo, y.hi, &mut pts);
            }
            Scalar::Scale(_) => unreachable!(),
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in pts {
            let v = self.eval(t) - a * t;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()) + a.abs() * y.lo.abs().max(y.hi.abs()));
        (a, lo - slack, hi + slack)
    }
}
