use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Closed interval on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(invalid(format!("interval [{lo}, {hi}] is empty or NaN")));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn full() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Largest |x - c| over the interval.
    pub fn max_abs_dev(&self, c: f64) -> f64 {
        (c - self.lo).max(self.hi - c).max(0.0)
    }

    /// Finite point used as a representative: midpoint when bounded, otherwise
    /// the finite endpoint, otherwise zero.
    pub fn center(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo,
            (false, true) => self.hi,
            (false, false) => 0.0,
        }
    }
}

/// Product of intervals, one per axis.
pub type Region = Vec<Interval>;

pub fn region_contains(region: &[Interval], x: &[f64]) -> bool {
    region.len() == x.len() && region.iter().zip(x).all(|(iv, &v)| iv.contains(v))
}
