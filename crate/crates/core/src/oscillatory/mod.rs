//! `int e^{2 pi i lambda g(x)} dmu(x)` for nonlinear phases `g`: direct
//! cut-set quadrature, the linearized upper bound and decay-exponent fits.

mod decay;
mod phase;

pub use decay::{decay_exponent_fit, fit_decay, BandMaximum, DecayConfig, DecayFit};
pub use phase::{HolderData, Phase, RealFn, GRID_SAFETY};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{cis, SelfSimilarMeasure};

/// Value of the oscillatory integral with its quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatoryValue {
    pub value: Complex64,
    pub error_bound: f64,
    pub words: usize,
}

/// Scale exponent `gamma = (1/(1+alpha) + 1) / 2`, the midpoint of the
/// admissible range `(1/(1+alpha), 1)`.
pub fn default_gamma(alpha: f64) -> f64 {
    0.5 * (1.0 / (1.0 + alpha) + 1.0)
}

/// `b(lambda) = lambda^{-gamma}`, clamped into `(0, 1)`.
pub fn default_scale(lambda: f64, alpha: f64) -> f64 {
    lambda.abs().max(1.0 + 1e-9).powf(-default_gamma(alpha)).min(0.5)
}

/// Cut-set quadrature nodes `(p_w, g(c_w))` with `c_w` the midpoint of the
/// cylinder `f_w(J)`; reusable across many frequencies.
#[derive(Debug, Clone)]
pub struct PhaseQuadrature {
    nodes: Vec<(f64, f64)>,
    lipschitz: f64,
    scale: f64,
    support_len: f64,
}

impl PhaseQuadrature {
    pub fn new(measure: &SelfSimilarMeasure, phase: &Phase, scale: f64) -> Result<Self> {
        let support = measure.support();
        let mid = support.center();
        let mut nodes = Vec::new();
        measure
            .ifs()
            .visit_cut_set(scale, measure.word_budget(), |_, r, t, p| {
                nodes.push((p, phase.eval(r * mid + t)));
            })
            .map_err(budget_error)?;
        Ok(PhaseQuadrature {
            nodes,
            lipschitz: phase.lipschitz_on(&support),
            scale,
            support_len: support.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `2 pi |lambda| Lip(g) b |J|`.
    pub fn error_bound(&self, lambda: f64) -> f64 {
        2.0 * PI * lambda.abs() * self.lipschitz * self.scale * self.support_len
    }

    pub fn evaluate(&self, lambda: f64) -> OscillatoryValue {
        let value = self
            .nodes
            .iter()
            .map(|&(p, g)| p * cis(2.0 * PI * lambda * g))
            .sum::<Complex64>();
        OscillatoryValue { value, error_bound: self.error_bound(lambda), words: self.nodes.len() }
    }
}

/// `sum_{w in W_b} p_w e^{2 pi i lambda g(c_w)}` with error bound
/// `2 pi |lambda| Lip(g) b |J|`.
pub fn oscillatory_integral(
    measure: &SelfSimilarMeasure,
    phase: &Phase,
    lambda: f64,
    scale: f64,
) -> Result<OscillatoryValue> {
    Ok(PhaseQuadrature::new(measure, phase, scale)?.evaluate(lambda))
}

/// Knobs of the linearized bound pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConfig {
    /// Large-deviation exponent `c0`: a word is heavy when
    /// `|mu_hat(g'(c_w) r_w lambda)| >= |lambda r C|^{-c0}`.
    pub census_c: f64,
    /// Census growth exponent `epsilon`; recorded, not derived.
    pub census_epsilon: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig { census_c: 0.1, census_epsilon: 0.05 }
    }
}

/// Words sharing one contraction ratio `r` (a class of `C_b`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioClass {
    pub ratio: f64,
    pub words: usize,
    pub mass: f64,
    pub threshold: f64,
    pub heavy_mass: f64,
    pub heavy_sum: f64,
    pub light_sum: f64,
}

/// Upper bound on `|int e^{2 pi i lambda g} dmu|` by linearizing `g` on each
/// cylinder of `W_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizedBound {
    pub lambda: f64,
    pub scale: f64,
    /// `sum_w p_w |mu_hat(g'(c_w) r_w lambda)|`.
    pub linear_sum: f64,
    /// `2 pi |lambda| H (b |J| / 2)^{1+alpha}`.
    pub remainder: f64,
    /// Accumulated evaluation error of the inner transforms.
    pub evaluation_error: f64,
    pub holder: HolderData,
    pub lipschitz: f64,
    pub classes: Vec<RatioClass>,
    pub config: BoundConfig,
}

impl LinearizedBound {
    pub fn total(&self) -> f64 {
        self.linear_sum + self.remainder + self.evaluation_error
    }
}

/// Linearized bound at `scale`. Each cylinder is expanded about its midpoint
/// `c_w = f_w(mid J)`, so that
/// `g(f_w(x)) = g(c_w) + g'(c_w) r_w (x - mid J) + O(H (|r_w||J|/2)^{1+alpha})`
/// and the linear part integrates to `mu_hat(g'(c_w) r_w lambda)` in modulus.
pub fn linearized_bound(
    measure: &SelfSimilarMeasure,
    phase: &Phase,
    lambda: f64,
    scale: f64,
    tolerance: f64,
    config: &BoundConfig,
) -> Result<LinearizedBound> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} must be positive")));
    }
    let support = measure.support();
    let holder = phase.holder_on(&support)?;
    let lipschitz = phase.lipschitz_on(&support);
    let mid = support.center();
    let mut words = Vec::new();
    measure
        .ifs()
        .visit_cut_set(scale, measure.word_budget(), |_, r, t, p| {
            let slope = phase.derivative(1, r * mid + t).unwrap();
            words.push((r, p, slope * r * lambda));
        })
        .map_err(budget_error)?;

    let evaluated: Vec<(f64, f64, f64, f64)> = words
        .par_iter()
        .map(|&(r, p, freq)| {
            measure.fourier(freq, tolerance).map(|v| (r, p, v.value.norm(), v.error_bound))
        })
        .collect::<Result<_>>()?;

    let mut classes: BTreeMap<u64, RatioClass> = BTreeMap::new();
    let mut linear_sum = 0.0;
    let mut evaluation_error = 0.0;
    for &(r, p, modulus, err) in &evaluated {
        linear_sum += p * modulus;
        evaluation_error += p * err;
        let key = ratio_key(r.abs());
        let class = classes.entry(key).or_insert_with(|| {
            let base = (lambda * r * lipschitz).abs();
            RatioClass {
                ratio: r.abs(),
                words: 0,
                mass: 0.0,
                threshold: if base > 1.0 { base.powf(-config.census_c) } else { 1.0 },
                heavy_mass: 0.0,
                heavy_sum: 0.0,
                light_sum: 0.0,
            }
        });
        class.words += 1;
        class.mass += p;
        if modulus >= class.threshold {
            class.heavy_mass += p;
            class.heavy_sum += p * modulus;
        } else {
            class.light_sum += p * modulus;
        }
    }
    let remainder = 2.0
        * PI
        * lambda.abs()
        * holder.constant
        * (scale * support.len() / 2.0).powf(1.0 + holder.alpha);
    Ok(LinearizedBound {
        lambda,
        scale,
        linear_sum,
        remainder,
        evaluation_error,
        holder,
        lipschitz,
        classes: classes.into_values().collect(),
        config: *config,
    })
}

/// Groups ratios equal up to relative `1e-9`.
fn ratio_key(r: f64) -> u64 {
    (r.ln() * 1e9).round() as i64 as u64
}

fn budget_error(e: Error) -> Error {
    match e {
        Error::ExplosionGuard { budget } => {
            Error::BudgetExceeded(format!("quadrature cut-set exceeds {budget} words"))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{validate_ifs, SimilarityMap};
    use crate::interval::Interval;

    fn cantor() -> SelfSimilarMeasure {
        SelfSimilarMeasure::new(
            validate_ifs(
                vec![SimilarityMap::new(1.0 / 3.0, 0.0), SimilarityMap::new(1.0 / 3.0, 2.0 / 3.0)],
                vec![0.5, 0.5],
                Interval::closed(0.0, 1.0),
            )
            .unwrap(),
        )
    }

    #[test]
    fn identity_phase_matches_fourier() {
        let m = cantor();
        for &lambda in &[1.0, 7.5, 40.0] {
            let o = oscillatory_integral(&m, &Phase::identity(), lambda, 1e-4).unwrap();
            let f = m.fourier_transform(lambda, 1e-10).unwrap();
            assert!((o.value - f.value).norm() <= o.error_bound + f.error_bound);
        }
    }

    #[test]
    fn constant_phase_has_no_oscillation() {
        let o = oscillatory_integral(&cantor(), &Phase::constant(0.3), 17.0, 0.01).unwrap();
        assert!((o.value - cis(2.0 * PI * 17.0 * 0.3)).norm() < 1e-12);
        assert!((o.value.norm() - 1.0).abs() < 1e-12);
        assert_eq!(o.error_bound, 0.0);
    }

    #[test]
    fn square_phase_two_resolutions() {
        let m = cantor();
        let g = Phase::monomial(2);
        let coarse = oscillatory_integral(&m, &g, 50.0, 1e-4).unwrap();
        let fine = oscillatory_integral(&m, &g, 50.0, 1e-5).unwrap();
        assert!((coarse.value - fine.value).norm() <= coarse.error_bound);
    }

    #[test]
    fn affine_phase_has_zero_remainder() {
        let m = cantor();
        let g = Phase::affine(2.0, 1.0);
        let lambda = 30.0;
        let b = linearized_bound(&m, &g, lambda, 0.01, 1e-10, &BoundConfig::default()).unwrap();
        assert_eq!(b.remainder, 0.0);
        let cs = m.ifs().cut_set(0.01).unwrap();
        let direct: f64 = cs
            .words
            .iter()
            .map(|w| w.mass * m.fourier_transform(2.0 * w.ratio * lambda, 1e-12).unwrap().value.norm())
            .sum();
        assert!((b.linear_sum - direct).abs() < 1e-9);
    }

    #[test]
    fn affine_modulus_invariance() {
        let m = cantor();
        let g = Phase::affine(3.0, 0.7);
        let lambda = 11.0;
        let o = oscillatory_integral(&m, &g, lambda, 1e-6).unwrap();
        let f = m.fourier_transform(3.0 * lambda, 1e-12).unwrap();
        assert!((o.value.norm() - f.value.norm()).abs() <= o.error_bound + f.error_bound);
    }

    #[test]
    fn bound_dominates_for_square() {
        let m = cantor();
        let g = Phase::monomial(2);
        for &lambda in &[10.0, 100.0, 1000.0] {
            let scale = default_scale(lambda, 1.0);
            let bound = linearized_bound(&m, &g, lambda, scale, 1e-8, &BoundConfig::default()).unwrap();
            let direct = oscillatory_integral(&m, &g, lambda, 1e-3 / lambda).unwrap();
            assert!(bound.total() >= direct.value.norm() - direct.error_bound, "lambda {lambda}");
            let mass: f64 = bound.classes.iter().map(|c| c.mass).sum();
            assert!((mass - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn low_frequency_bound_is_vacuous() {
        let m = cantor();
        let g = Phase::monomial(2);
        // lambda * b^2 >= 1
        let b = linearized_bound(&m, &g, 20.0, 0.4, 1e-8, &BoundConfig::default()).unwrap();
        assert!(b.total() >= 1.0);
    }

    #[test]
    fn gamma_midpoint() {
        assert!((default_gamma(1.0) - 0.75).abs() < 1e-15);
        assert!((default_scale(1e4, 1.0) - 1e-3).abs() < 1e-15);
    }
}
