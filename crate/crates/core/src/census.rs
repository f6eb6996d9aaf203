//! Counts unit frequency intervals on which `|mu_hat|` is large.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::SelfSimilarMeasure;
use crate::stats::fit_line;

/// Intervals handed to a worker at a time.
pub const BLOCK_SIZE: usize = 4096;

/// Largest admissible `e^t`.
pub const DEFAULT_FREQUENCY_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusConfig {
    pub frequency_budget: f64,
    pub block_size: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { frequency_budget: DEFAULT_FREQUENCY_BUDGET, block_size: BLOCK_SIZE }
    }
}

/// Scan result for `[n, n+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalScan {
    pub n: i64,
    pub grid_max: f64,
    pub bad: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub t: f64,
    pub c: f64,
    pub range: (f64, f64),
    pub threshold: f64,
    pub tolerance: f64,
    pub bad_interval_indices: Vec<i64>,
    pub count: usize,
    /// Smallest step the scan may take, `min(tolerance, threshold/4) / Lip`.
    pub grid_step: f64,
    pub lipschitz: f64,
    pub evaluations: usize,
    #[serde(skip)]
    pub intervals: Vec<IntervalScan>,
}

/// Scans `[lo, hi]`, stepping by `(threshold - |mu_hat| - err) / Lip` so
/// every skipped frequency is certified below the threshold. Stops at the
/// first sample within `tolerance` of the threshold.
fn scan_interval(
    measure: &SelfSimilarMeasure,
    lo: f64,
    hi: f64,
    threshold: f64,
    tolerance: f64,
    lip: f64,
    min_step: f64,
) -> Result<(f64, bool, usize)> {
    let eval_tol = 0.1 * tolerance.min(threshold);
    let mut lambda = lo;
    let mut grid_max: f64 = 0.0;
    let mut samples = 0;
    loop {
        let f = measure.fourier(lambda, eval_tol)?;
        samples += 1;
        let v = f.value.norm();
        grid_max = grid_max.max(v);
        let upper = v + f.error_bound;
        if upper >= threshold - tolerance {
            return Ok((grid_max, true, samples));
        }
        if lambda >= hi {
            return Ok((grid_max, false, samples));
        }
        let step = ((threshold - upper) / lip).max(min_step);
        lambda = (lambda + step).min(hi);
    }
}

/// Flags every `n` with `[n, n+1]` meeting `[-e^t, e^t]` on which some
/// sampled `|mu_hat(lambda)|` is at least `e^{-ct} - tolerance`.
pub fn bad_interval_census(
    measure: &SelfSimilarMeasure,
    t: f64,
    c: f64,
    tolerance: f64,
) -> Result<CensusReport> {
    bad_interval_census_with(measure, t, c, tolerance, &CensusConfig::default())
}

pub fn bad_interval_census_with(
    measure: &SelfSimilarMeasure,
    t: f64,
    c: f64,
    tolerance: f64,
    config: &CensusConfig,
) -> Result<CensusReport> {
    if !(t > 0.0 && c > 0.0) {
        return Err(Error::InvalidArgument(format!("need t > 0 and c > 0, got t = {t}, c = {c}")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} must be positive")));
    }
    let e = t.exp();
    if !(e <= config.frequency_budget) {
        return Err(Error::BudgetExceeded(format!(
            "e^t = {e:.6e} exceeds the frequency budget {:.6e}",
            config.frequency_budget
        )));
    }
    let threshold = (-c * t).exp();
    let lip = measure.fourier_lipschitz().max(f64::MIN_POSITIVE);
    let grid_step = tolerance.min(0.25 * threshold) / lip;

    // |mu_hat| is even, so [n, n+1] for n < 0 is the mirror of [-n-1, -n].
    let top = e.floor() as i64;
    let positive: Vec<i64> = (0..=top).collect();
    let block = config.block_size.max(1);
    let scans: Vec<IntervalScan> = positive
        .par_chunks(block)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&n| {
                    let lo = n as f64;
                    let hi = (lo + 1.0).min(e);
                    let (grid_max, bad, samples) =
                        scan_interval(measure, lo, hi, threshold, tolerance, lip, grid_step)?;
                    Ok(IntervalScan { n, grid_max, bad, samples })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut intervals: Vec<IntervalScan> = scans
        .iter()
        .rev()
        .map(|s| IntervalScan { n: -s.n - 1, ..*s })
        .collect();
    intervals.extend(scans.iter().copied());
    let bad_interval_indices: Vec<i64> = intervals.iter().filter(|s| s.bad).map(|s| s.n).collect();
    let evaluations = 2 * scans.iter().map(|s| s.samples).sum::<usize>();
    Ok(CensusReport {
        t,
        c,
        range: (-e, e),
        threshold,
        tolerance,
        count: bad_interval_indices.len(),
        bad_interval_indices,
        grid_step,
        lipschitz: lip,
        evaluations,
        intervals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCurve {
    pub c: f64,
    pub points: Vec<(f64, usize)>,
    /// Slope of `log(count + 1)` against `t`; absent for fewer than two points.
    pub epsilon_hat: Option<f64>,
}

pub fn census_scaling_curve(
    measure: &SelfSimilarMeasure,
    t_list: &[f64],
    c: f64,
    tolerance: f64,
) -> Result<ScalingCurve> {
    if t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("t values must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let report = bad_interval_census(measure, t, c, tolerance)?;
        points.push((t, report.count));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64 + 1.0).ln()).collect();
    let epsilon_hat = fit_line(&xs, &ys).map(|f| f.slope);
    Ok(ScalingCurve { c, points, epsilon_hat })
}
