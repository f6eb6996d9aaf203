use serde::{Deserialize, Serialize};

/// A real interval with independently open or closed endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub lo_open: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub hi_open: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    /// Closed interval spanned by two points in either order.
    pub fn spanning(a: f64, b: f64) -> Self {
        if a <= b {
            Interval::closed(a, b)
        } else {
            Interval::closed(b, a)
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn max_abs(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// True when the closed interval `[lo, hi]` lies inside `self`.
    pub fn contains_closed(&self, lo: f64, hi: f64) -> bool {
        self.contains(lo) && self.contains(hi)
    }

    /// True when the closed interval `[lo, hi]` meets `self`.
    pub fn meets_closed(&self, lo: f64, hi: f64) -> bool {
        let left_ok = if self.lo_open { hi > self.lo } else { hi >= self.lo };
        let right_ok = if self.hi_open { lo < self.hi } else { lo <= self.hi };
        left_ok && right_ok
    }

    pub fn is_subset_of(&self, other: &Interval, slack: f64) -> bool {
        self.lo >= other.lo - slack && self.hi <= other.hi + slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_and_closed_membership() {
        let open = Interval::open(1.0 / 3.0, 2.0 / 3.0);
        assert!(!open.contains(1.0 / 3.0));
        assert!(open.contains(0.5));
        assert!(!open.meets_closed(2.0 / 9.0, 1.0 / 3.0));
        let closed = Interval::closed(0.0, 1.0 / 3.0);
        assert!(closed.contains_closed(0.0, 1.0 / 3.0));
        assert!(closed.meets_closed(1.0 / 3.0, 0.5));
    }

    #[test]
    fn spanning_sorts() {
        let i = Interval::spanning(2.0, -1.0);
        assert_eq!((i.lo, i.hi), (-1.0, 2.0));
        assert_eq!(i.max_abs(), 2.0);
    }
}
