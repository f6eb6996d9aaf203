use serde::Serialize;

use super::SelfSimilarMeasure;
use crate::error::{Error, Result};
use crate::ifs::cylinder;
use crate::interval::Interval;

/// `lower <= mu(I) <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassBracket {
    pub lower: f64,
    pub upper: f64,
}

impl MassBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl SelfSimilarMeasure {
    /// Brackets `mu(interval)` by the cut-set at `scale`: the lower bound sums
    /// cylinders contained in the interval, the upper bound those meeting it.
    pub fn interval_mass(&self, interval: &Interval, scale: f64) -> Result<MassBracket> {
        let support = self.support();
        let mut lower = 0.0;
        let mut upper = 0.0;
        self.ifs
            .visit_cut_set(scale, self.word_budget, |_, r, t, p| {
                let c = cylinder(r, t, &support);
                if interval.meets_closed(c.lo, c.hi) {
                    upper += p;
                    if interval.contains_closed(c.lo, c.hi) {
                        lower += p;
                    }
                }
            })
            .map_err(|e| match e {
                Error::ExplosionGuard { budget } => {
                    Error::BudgetExceeded(format!("mass cut-set exceeds {budget} words"))
                }
                other => other,
            })?;
        Ok(MassBracket { lower: lower.min(1.0), upper: upper.min(1.0) })
    }
}
