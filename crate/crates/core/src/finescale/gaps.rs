use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::ks_distance;

/// Default CDF grid: `s = 0, 0.05, ..., 6`.
pub fn default_s_grid() -> Vec<f64> {
    (0..=120).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub ordered: Vec<f64>,
    /// `N (theta_j - theta_{j-1})` for `j = 1..=N`, `theta_0 = theta_N - 1`.
    pub scaled_gaps: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// Empirical `G(s)` on `s_grid`.
    pub empirical_cdf: Vec<f64>,
    /// Sup distance between the empirical law and `1 - e^{-s}`.
    pub ks_distance: f64,
}

impl GapReport {
    pub fn mean_gap(&self) -> f64 {
        self.scaled_gaps.iter().sum::<f64>() / self.n as f64
    }
}

pub fn gap_distribution(points: &[f64]) -> Result<GapReport> {
    gap_distribution_on(points, &default_s_grid())
}

pub fn gap_distribution_on(points: &[f64], s_grid: &[f64]) -> Result<GapReport> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least two points, got {n}")));
    }
    if let Some(x) = points.iter().find(|x| !(**x >= 0.0 && **x < 1.0)) {
        return Err(Error::InvalidArgument(format!("point {x} not in [0, 1)")));
    }
    let mut ordered = points.to_vec();
    ordered.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut scaled_gaps = Vec::with_capacity(n);
    scaled_gaps.push(nf * (ordered[0] - (ordered[n - 1] - 1.0)));
    scaled_gaps.extend(ordered.windows(2).map(|w| nf * (w[1] - w[0])));
    let mut sorted_gaps = scaled_gaps.clone();
    sorted_gaps.sort_by(|a, b| a.total_cmp(b));
    let empirical_cdf = s_grid
        .iter()
        .map(|&s| sorted_gaps.partition_point(|&g| g <= s) as f64 / nf)
        .collect();
    let ks = ks_distance(&scaled_gaps, |s| if s <= 0.0 { 0.0 } else { 1.0 - (-s).exp() });
    Ok(GapReport {
        n,
        ordered,
        scaled_gaps,
        s_grid: s_grid.to_vec(),
        empirical_cdf,
        ks_distance: ks,
    })
}
