use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A real interval with independently open or closed ends.
///
/// Infinite endpoints are stored as `f64::INFINITY` / `f64::NEG_INFINITY`
/// and are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "crate::report::ser_ext_f64")]
    pub lo: f64,
    #[serde(serialize_with = "crate::report::ser_ext_f64")]
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval(format!("endpoints ({lo}, {hi}) are reversed")));
        }
        if lo >= hi {
            return Err(Error::InvalidInterval(format!("lo = {lo} must be below hi = {hi}")));
        }
        Ok(Self {
            lo,
            hi,
            lo_open: lo_open || lo.is_infinite(),
            hi_open: hi_open || hi.is_infinite(),
        })
    }

    /// `[lo, hi]`. Panics on reversed endpoints; use [`Interval::new`] for untrusted input.
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false).expect("valid closed interval")
    }

    /// `(lo, hi)`.
    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true).expect("valid open interval")
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `(0, ∞)`
    pub fn positive() -> Self {
        Self::open(0.0, f64::INFINITY)
    }

    /// `(-∞, 0)`
    pub fn negative() -> Self {
        Self::open(f64::NEG_INFINITY, 0.0)
    }

    /// `[0, ∞)`
    pub fn nonnegative() -> Self {
        Self::new(0.0, f64::INFINITY, false, true).unwrap()
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// True when `other` lies inside `self`, respecting openness.
    pub fn covers(&self, other: &Interval) -> bool {
        let lo_ok = other.lo > self.lo || (other.lo == self.lo && (!self.lo_open || other.lo_open));
        let hi_ok = other.hi < self.hi || (other.hi == self.hi && (!self.hi_open || other.hi_open));
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        let (hi, hi_open) = if self.hi < other.hi {
            (self.hi, self.hi_open)
        } else if other.hi < self.hi {
            (other.hi, other.hi_open)
        } else {
            (self.hi, self.hi_open || other.hi_open)
        };
        Interval::new(lo, hi, lo_open, hi_open).ok()
    }

    /// Clip infinite ends to `[-limit, limit]`.
    pub fn clip(&self, limit: f64) -> Option<Interval> {
        self.intersect(&Interval::closed(-limit, limit))
    }

    /// Evaluation points of a uniform `n`-node grid.
    ///
    /// Open ends are nudged inward by `1e-12 * (1 + |endpoint|)` so every
    /// node lies inside the interval. Requires a bounded interval and `n >= 2`.
    pub fn grid(&self, n: usize) -> Result<Vec<f64>> {
        if !self.is_bounded() {
            return Err(Error::InvalidInterval(format!("cannot grid the unbounded interval {self}")));
        }
        let n = n.max(2);
        let lo = if self.lo_open { self.lo + 1e-12 * (1.0 + self.lo.abs()) } else { self.lo };
        let hi = if self.hi_open { self.hi - 1e-12 * (1.0 + self.hi.abs()) } else { self.hi };
        let step = (hi - lo) / (n - 1) as f64;
        Ok((0..n)
            .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
            .collect())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_respects_openness() {
        let i = Interval::new(0.0, 1.0, true, false).unwrap();
        assert!(!i.contains(0.0));
        assert!(i.contains(1.0));
        assert!(Interval::nonnegative().contains(0.0));
        assert!(!Interval::positive().contains(0.0));
    }

    #[test]
    fn rejects_reversed() {
        assert!(Interval::new(1.0, 0.0, false, false).is_err());
        assert!(Interval::new(1.0, 1.0, false, false).is_err());
        assert!(Interval::new(f64::NAN, 1.0, false, false).is_err());
    }

    #[test]
    fn infinite_ends_are_open() {
        let i = Interval::new(f64::NEG_INFINITY, 2.0, false, false).unwrap();
        assert!(i.lo_open);
        assert!(!i.is_bounded());
        assert!(i.grid(4).is_err());
    }

    #[test]
    fn grid_stays_inside() {
        let i = Interval::open(0.0, 1.0);
        let g = i.grid(5).unwrap();
        assert_eq!(g.len(), 5);
        assert!(g.iter().all(|&x| i.contains(x)));
        let c = Interval::closed(0.0, 1.0).grid(3).unwrap();
        assert_eq!(c, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn intersection_and_cover() {
        let a = Interval::closed(0.0, 2.0);
        let b = Interval::open(1.0, 3.0);
        let c = a.intersect(&b).unwrap();
        assert_eq!(c, Interval::new(1.0, 2.0, true, false).unwrap());
        assert!(a.covers(&c));
        assert!(!c.covers(&a));
        assert!(Interval::closed(0.0, 1.0).intersect(&Interval::closed(2.0, 3.0)).is_none());
    }
}
