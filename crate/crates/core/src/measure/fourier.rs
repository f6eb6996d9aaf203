use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{cis, SelfSimilarMeasure, MAX_TAYLOR_ORDER};
use crate::error::{Error, Result};

/// Leaves of the recursion are cut where `2 pi |r_w lambda| rho <= LEAF_ARGUMENT`,
/// `rho` being the hull half-length.
const LEAF_ARGUMENT: f64 = 1.0;

const EPS: f64 = f64::EPSILON;

/// `mu_hat(lambda)` with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierValue {
    pub value: Complex64,
    pub error_bound: f64,
    pub leaves: usize,
}

/// Truncated homogeneous product with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub factors: usize,
}

impl SelfSimilarMeasure {
    /// `mu_hat(lambda) = int e^{2 pi i lambda x} dmu(x)` to absolute error
    /// `tolerance`.
    ///
    /// Unrolls `mu_hat(lambda) = sum_w p_w e^{2 pi i t_w lambda} mu_hat(r_w lambda)`
    /// over a cut-set fine enough that every leaf frequency is small, then
    /// evaluates each leaf by the moment Taylor series of `mu_hat` about the
    /// hull center.
    pub fn fourier_transform(&self, lambda: f64, tolerance: f64) -> Result<FourierValue> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {tolerance} must be positive")));
        }
        if lambda == 0.0 {
            return Ok(FourierValue { value: Complex64::new(1.0, 0.0), error_bound: 0.0, leaves: 1 });
        }
        let rho = self.rho();
        let root_arg = 2.0 * PI * lambda.abs() * rho;
        let leaf_arg = LEAF_ARGUMENT.min(root_arg);
        let order = taylor_order(leaf_arg, 0.5 * tolerance).ok_or_else(|| {
            Error::BudgetExceeded(format!("tolerance {tolerance} below the Taylor floor"))
        })?;
        let center = self.hull.center();
        let rounding = (2.0 * PI * lambda.abs() * self.hull.max_abs() + order as f64 + 16.0) * 4.0 * EPS;

        if root_arg <= LEAF_ARGUMENT {
            let value = cis(2.0 * PI * lambda * center) * self.taylor_sum(lambda, order);
            let error_bound = taylor_remainder(root_arg, order) + rounding;
            return Ok(FourierValue { value, error_bound, leaves: 1 });
        }

        let scale = LEAF_ARGUMENT / root_arg;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut truncation = 0.0;
        let leaves = self
            .ifs
            .visit_cut_set(scale, self.word_budget, |_, r, t, p| {
                let s = r * lambda;
                let phase = cis(2.0 * PI * lambda * (t + r * center));
                sum += p * phase * self.taylor_sum(s, order);
                truncation += p * taylor_remainder(2.0 * PI * s.abs() * rho, order);
            })
            .map_err(|e| match e {
                Error::ExplosionGuard { budget } => Error::BudgetExceeded(format!(
                    "cut-set for lambda = {lambda} exceeds {budget} words"
                )),
                other => other,
            })?;
        Ok(FourierValue {
            value: sum,
            error_bound: truncation + rounding + leaves as f64 * EPS,
            leaves,
        })
    }

    /// `prod_{k=0}^{factors-1} sum_i p_i exp(2 pi i t_i r^k lambda)` for an
    /// IFS with a common ratio `r`.
    pub fn fourier_homogeneous_product(&self, lambda: f64, factors: usize) -> Result<ProductValue> {
        let r = self.ifs.common_ratio().ok_or(Error::NotHomogeneous)?;
        if factors == 0 {
            return Err(Error::InvalidArgument("factors must be at least 1".into()));
        }
        if lambda == 0.0 {
            return Ok(ProductValue { value: Complex64::new(1.0, 0.0), tail_bound: 0.0, factors });
        }
        let maps = self.ifs.maps();
        let weights = self.ifs.weights();
        let mut value = Complex64::new(1.0, 0.0);
        let mut freq = lambda;
        for _ in 0..factors {
            let factor: Complex64 = maps
                .iter()
                .zip(weights)
                .map(|(m, &p)| p * cis(2.0 * PI * m.translation * freq))
                .sum();
            value *= factor;
            freq *= r;
        }
        let t_max = maps.iter().map(|m| m.translation.abs()).fold(0.0, f64::max);
        let tail = 2.0 * PI * lambda.abs() * t_max * r.abs().powi(factors as i32) / (1.0 - r.abs());
        let rounding = (factors as f64 * 8.0 + 2.0 * PI * lambda.abs() * t_max) * EPS;
        Ok(ProductValue { value, tail_bound: tail + rounding, factors })
    }

    /// Homogeneous product with enough factors to reach `tolerance`.
    pub fn fourier_homogeneous_auto(&self, lambda: f64, tolerance: f64) -> Result<ProductValue> {
        let r = self.ifs.common_ratio().ok_or(Error::NotHomogeneous)?.abs();
        let t_max = self.ifs.maps().iter().map(|m| m.translation.abs()).fold(0.0, f64::max);
        let lead = 2.0 * PI * lambda.abs() * t_max / (1.0 - r);
        let factors = if lead <= 0.0 {
            1
        } else {
            ((0.5 * tolerance / lead).ln() / r.ln()).ceil().max(1.0) as usize
        };
        self.fourier_homogeneous_product(lambda, factors.min(100_000))
    }

    fn rho(&self) -> f64 {
        0.5 * self.hull.len() * (1.0 + 1e-12)
    }

    /// `sum_{k<=order} (2 pi i s)^k E[(X-c)^k]/k!` by Horner.
    fn taylor_sum(&self, s: f64, order: usize) -> Complex64 {
        let w = Complex64::new(0.0, 2.0 * PI * s);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=order).rev() {
            acc = acc * w + self.scaled_moments[k];
        }
        acc
    }
}

/// `z^{K+1} / (K+1)!`.
fn taylor_remainder(z: f64, order: usize) -> f64 {
    (1..=order + 1).fold(1.0, |acc, j| acc * z / j as f64)
}

fn taylor_order(z: f64, target: f64) -> Option<usize> {
    (0..MAX_TAYLOR_ORDER).find(|&k| taylor_remainder(z, k) <= target)
}
