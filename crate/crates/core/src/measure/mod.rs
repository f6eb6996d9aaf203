//! Fourier transform, interval masses and Frostman exponent of a
//! self-similar measure.

mod fourier;
mod frostman;
mod mass;

pub use fourier::{FourierValue, ProductValue};
pub use frostman::FrostmanEstimate;
pub use mass::MassBracket;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::ifs::{IteratedFunctionSystem, DEFAULT_WORD_BUDGET};
use crate::interval::Interval;

/// Highest Taylor order kept for the small-frequency base case.
const MAX_TAYLOR_ORDER: usize = 48;

/// The self-similar measure `mu = sum_i p_i f_i mu` of an IFS.
#[derive(Debug, Clone)]
pub struct SelfSimilarMeasure {
    ifs: IteratedFunctionSystem,
    hull: Interval,
    /// `E[(X - c)^k] / k!` with `c` the hull center.
    scaled_moments: Vec<f64>,
    word_budget: usize,
}

impl SelfSimilarMeasure {
    pub fn new(ifs: IteratedFunctionSystem) -> Self {
        let hull = ifs.attractor_hull();
        let scaled_moments = central_moments(&ifs, hull.center(), MAX_TAYLOR_ORDER);
        SelfSimilarMeasure { ifs, hull, scaled_moments, word_budget: DEFAULT_WORD_BUDGET }
    }

    pub fn with_word_budget(mut self, budget: usize) -> Self {
        self.word_budget = budget;
        self
    }

    pub fn ifs(&self) -> &IteratedFunctionSystem {
        &self.ifs
    }

    pub fn support(&self) -> Interval {
        self.ifs.support()
    }

    /// Bounding interval of the attractor.
    pub fn hull(&self) -> Interval {
        self.hull
    }

    pub fn word_budget(&self) -> usize {
        self.word_budget
    }

    /// Lipschitz constant of `lambda -> mu_hat(lambda)`: `2 pi max |x|`.
    pub fn fourier_lipschitz(&self) -> f64 {
        2.0 * PI * self.hull.max_abs()
    }

    pub fn mean(&self) -> f64 {
        self.hull.center() + self.scaled_moments[1]
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.scaled_moments[2] - self.scaled_moments[1].powi(2)
    }

    /// `mu_hat` to absolute error `tolerance`, using the homogeneous product
    /// when all ratios agree and the cut-set recursion otherwise.
    pub fn fourier(&self, lambda: f64, tolerance: f64) -> Result<FourierValue> {
        match self.ifs.common_ratio() {
            Some(_) => {
                let p = self.fourier_homogeneous_auto(lambda, tolerance)?;
                Ok(FourierValue { value: p.value, error_bound: p.tail_bound, leaves: 1 })
            }
            None => self.fourier_transform(lambda, tolerance),
        }
    }
}

/// Scaled central moments `m_k / k!` of `mu` about `c`, from the
/// self-similarity relation `X = r_I X' + t_I`.
fn central_moments(ifs: &IteratedFunctionSystem, c: f64, order: usize) -> Vec<f64> {
    let maps = ifs.maps();
    let weights = ifs.weights();
    // Y = X - c satisfies Y = r_i Y' + d_i.
    let shifts: Vec<f64> = maps.iter().map(|m| m.translation + m.ratio * c - c).collect();
    let mut scaled = vec![0.0; order + 1];
    scaled[0] = 1.0;
    // inv_fact[j] = 1/j!
    let mut inv_fact = vec![1.0; order + 1];
    for j in 1..=order {
        inv_fact[j] = inv_fact[j - 1] / j as f64;
    }
    for k in 1..=order {
        let mut rhs = 0.0;
        let mut self_coeff = 0.0;
        for ((m, &p), &d) in maps.iter().zip(weights).zip(&shifts) {
            // sum_j r^j d^(k-j)/(k-j)! * scaled[j]
            let mut acc = 0.0;
            let mut r_pow = 1.0;
            for (j, s) in scaled.iter().enumerate().take(k) {
                acc += r_pow * d.powi((k - j) as i32) * inv_fact[k - j] * s;
                r_pow *= m.ratio;
            }
            rhs += p * acc;
            self_coeff += p * r_pow;
        }
        scaled[k] = rhs / (1.0 - self_coeff);
    }
    scaled
}

#[inline]
pub fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}
