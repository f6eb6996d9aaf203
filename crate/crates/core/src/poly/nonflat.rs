use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::oscillatory::Phase;

/// Largest grid the certificate will scan.
const MAX_GRID_POINTS: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonflatCertificate {
    /// Smallest `k <= k_max` with `max_{1<=j<=k} |h^(j)| >= c0` on the grid.
    pub k: usize,
    pub delta: f64,
    pub rho: f64,
    pub grid_points: usize,
    /// Smallest grid value of `max_{1<=j<=k} |h^(j)|`.
    pub min_max_derivative: f64,
    /// `c0 - c0/4`, holding everywhere on `J` by the choice of `rho`.
    pub guaranteed_lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonflatRefutation {
    pub witness: f64,
    pub max_derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NonflatOutcome {
    Certified(NonflatCertificate),
    Refuted(NonflatRefutation),
}

impl NonflatOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, NonflatOutcome::Certified(_))
    }
}

/// Checks `max_{1<=j<=k} |h^(j)| >= c0` on a grid of spacing `rho` over
/// `J`, with `rho` small enough that each `h^(j)` moves by at most `c0/4`
/// between grid points.
pub fn nonflat_certificate(phase: &Phase, j: &Interval, k_max: usize, c0: f64) -> Result<NonflatOutcome> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if !(c0 > 0.0) {
        return Err(Error::InvalidArgument(format!("c0 = {c0} must be positive")));
    }
    if !(j.len() > 0.0) {
        return Err(Error::InvalidArgument("J must have positive length".into()));
    }
    let mut lip: f64 = 0.0;
    for order in 2..=k_max + 1 {
        lip = lip.max(phase.max_abs_derivative(order, j)? * crate::oscillatory::GRID_SAFETY);
    }
    let rho = if lip > 0.0 { (c0 / (4.0 * lip)).min(j.len()) } else { j.len() };
    let cells = (j.len() / rho).ceil();
    if cells + 1.0 > MAX_GRID_POINTS as f64 {
        return Err(Error::BudgetExceeded(format!("non-flatness grid needs {cells} cells")));
    }
    let cells = cells.max(1.0) as usize;
    let mut k_needed = 1;
    let mut min_max: f64 = f64::INFINITY;
    for i in 0..=cells {
        let x = if i == cells { j.hi } else { j.lo + i as f64 * rho };
        let mut best: f64 = 0.0;
        let mut first = None;
        for order in 1..=k_max {
            best = best.max(phase.derivative(order, x).ok_or(Error::OracleMissing { order })?.abs());
            if first.is_none() && best >= c0 {
                first = Some(order);
            }
        }
        match first {
            None => {
                return Ok(NonflatOutcome::Refuted(NonflatRefutation { witness: x, max_derivative: best }))
            }
            Some(order) => k_needed = k_needed.max(order),
        }
        min_max = min_max.min(best);
    }
    Ok(NonflatOutcome::Certified(NonflatCertificate {
        k: k_needed,
        delta: 1.0 / (2.0 * k_needed as f64),
        rho,
        grid_points: cells + 1,
        min_max_derivative: min_max,
        guaranteed_lower_bound: 0.75 * c0,
    }))
}
