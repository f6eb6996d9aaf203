use serde::Serialize;

use super::SelfSimilarMeasure;
use crate::error::{Error, Result};
use crate::ifs::cylinder;
use crate::stats::fit_line;

/// Cylinders used for ball masses are this many times finer than the
/// finest ball width.
const CYLINDER_REFINEMENT: f64 = 16.0;

/// Empirical Frostman exponent: `sup_x mu(B(x, r)) ~ C r^{s0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrostmanEstimate {
    pub exponent: f64,
    /// `exp(intercept)` of the log-log fit.
    pub constant: f64,
    pub scales_used: Vec<f64>,
    pub max_ball_mass: Vec<f64>,
    pub fit_residual: f64,
}

impl SelfSimilarMeasure {
    /// Fits `log M(r)` against `log r` over dyadic `r = 2^{-j}`, `j >= 2`,
    /// down to `finest_scale`, where `M(r)` is the largest upper mass of a
    /// window of width `r`.
    pub fn frostman_exponent_estimate(&self, finest_scale: f64) -> Result<FrostmanEstimate> {
        if !(finest_scale > 0.0 && finest_scale < 0.25) {
            return Err(Error::InvalidArgument(format!(
                "finest scale {finest_scale} not in (0, 1/4)"
            )));
        }
        let support = self.support();
        let cyl_scale = (finest_scale / (CYLINDER_REFINEMENT * support.len())).min(0.5);
        let mut cylinders = Vec::new();
        self.ifs.visit_cut_set(cyl_scale, self.word_budget, |_, r, t, p| {
            let c = cylinder(r, t, &support);
            cylinders.push((c.lo, c.hi, p));
        })?;

        // upper mass of [u, v] = P(lo <= v) - P(hi < u)
        let mut by_lo: Vec<(f64, f64)> = cylinders.iter().map(|&(lo, _, p)| (lo, p)).collect();
        let mut by_hi: Vec<(f64, f64)> = cylinders.iter().map(|&(_, hi, p)| (hi, p)).collect();
        by_lo.sort_by(|a, b| a.0.total_cmp(&b.0));
        by_hi.sort_by(|a, b| a.0.total_cmp(&b.0));
        let prefix = |v: &[(f64, f64)]| {
            let mut acc = vec![0.0; v.len() + 1];
            for (i, (_, p)) in v.iter().enumerate() {
                acc[i + 1] = acc[i] + p;
            }
            acc
        };
        let lo_mass = prefix(&by_lo);
        let hi_mass = prefix(&by_hi);
        let upper_mass = |u: f64, v: f64| {
            let n_lo = by_lo.partition_point(|c| c.0 <= v);
            let n_hi = by_hi.partition_point(|c| c.0 < u);
            lo_mass[n_lo] - hi_mass[n_hi]
        };

        let mut endpoints: Vec<f64> = cylinders.iter().flat_map(|&(lo, hi, _)| [lo, hi]).collect();
        endpoints.sort_by(|a, b| a.total_cmp(b));
        endpoints.dedup();

        let hull = self.hull;
        let mut scales = Vec::new();
        let mut maxima = Vec::new();
        let mut j = 2;
        loop {
            let r = 0.5f64.powi(j);
            if r < finest_scale * (1.0 - 1e-12) {
                break;
            }
            let mut best: f64 = 0.0;
            for &e in &endpoints {
                best = best.max(upper_mass(e - 0.5 * r, e + 0.5 * r));
            }
            let step = 0.25 * r;
            let mut u = hull.lo - r;
            while u <= hull.hi {
                best = best.max(upper_mass(u, u + r));
                u += step;
            }
            scales.push(r);
            maxima.push(best.min(1.0));
            j += 1;
        }

        let xs: Vec<f64> = scales.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = maxima.iter().map(|m| m.ln()).collect();
        let fit = fit_line(&xs, &ys).ok_or_else(|| {
            Error::InvalidArgument("need at least two dyadic scales for the fit".into())
        })?;
        Ok(FrostmanEstimate {
            exponent: fit.slope,
            constant: fit.intercept.exp(),
            scales_used: scales,
            max_ball_mass: maxima,
            fit_residual: fit.rms_residual,
        })
    }
}
