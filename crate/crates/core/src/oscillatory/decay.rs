use rayon::prelude::*;
use serde::Serialize;

use super::{Phase, PhaseQuadrature};
use crate::error::{Error, Result};
use crate::measure::SelfSimilarMeasure;
use crate::stats::fit_line;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayConfig {
    pub samples_per_band: usize,
    /// Quadrature error bound allowed at the top frequency.
    pub quadrature_tolerance: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { samples_per_band: 256, quadrature_tolerance: 1e-3 }
    }
}

/// Largest sampled `|int e^{2 pi i lambda g} dmu|` over `lambda in [T, 2T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandMaximum {
    pub band_start: f64,
    pub maximum: f64,
    pub argmax: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub bands: Vec<BandMaximum>,
    /// Negated slope of `log max` against `log T`.
    pub tau: f64,
    pub constant: f64,
    pub fit_residual: f64,
}

impl DecayFit {
    /// `C T^{-tau}` at the band start `T`.
    pub fn fitted(&self, t: f64) -> f64 {
        self.constant * t.powf(-self.tau)
    }
}

/// Least-squares fit of `log max = log C - tau log T`.
pub fn fit_decay(bands: Vec<BandMaximum>) -> Result<DecayFit> {
    let xs: Vec<f64> = bands.iter().map(|b| b.band_start.ln()).collect();
    let ys: Vec<f64> = bands.iter().map(|b| b.maximum.max(f64::MIN_POSITIVE).ln()).collect();
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| Error::InvalidArgument("need at least two bands to fit a decay rate".into()))?;
    Ok(DecayFit { bands, tau: -fit.slope, constant: fit.intercept.exp(), fit_residual: fit.rms_residual })
}

/// Samples `samples_per_band` uniformly spaced frequencies in each dyadic
/// band `[T, 2T]`, `T = T_min 2^j`, `2T <= T_max`, and fits `tau`.
pub fn decay_exponent_fit(
    measure: &SelfSimilarMeasure,
    phase: &Phase,
    t_min: f64,
    t_max: f64,
    config: &DecayConfig,
) -> Result<DecayFit> {
    if !(t_min > 1.0 && t_max > t_min) {
        return Err(Error::InvalidArgument(format!("need 1 < T_min < T_max, got {t_min}, {t_max}")));
    }
    if config.samples_per_band < 16 {
        return Err(Error::InvalidArgument("samples_per_band must be at least 16".into()));
    }
    let mut starts = Vec::new();
    let mut t = t_min;
    while 2.0 * t <= t_max * (1.0 + 1e-12) {
        starts.push(t);
        t *= 2.0;
    }
    if starts.is_empty() {
        return Err(Error::InvalidArgument("no complete dyadic band in range".into()));
    }
    let support = measure.support();
    let top = 2.0 * starts[starts.len() - 1];
    let lip = phase.lipschitz_on(&support);
    let scale = if lip == 0.0 {
        0.5
    } else {
        (config.quadrature_tolerance / (2.0 * std::f64::consts::PI * top * lip * support.len())).min(0.5)
    };
    let quad = PhaseQuadrature::new(measure, phase, scale)?;
    let n = config.samples_per_band;
    let bands = starts
        .iter()
        .map(|&t| {
            let (maximum, argmax) = (0..n)
                .into_par_iter()
                .map(|i| {
                    let lambda = t + t * i as f64 / (n - 1) as f64;
                    (quad.evaluate(lambda).value.norm(), lambda)
                })
                .reduce(|| (f64::NEG_INFINITY, t), |a, b| if b.0 > a.0 { b } else { a });
            BandMaximum { band_start: t, maximum, argmax, error_bound: quad.error_bound(2.0 * t) }
        })
        .collect();
    fit_decay(bands)
}
