use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points used when maximizing derivative oracles over an interval.
const GRID_POINTS: usize = 2049;

/// Safety factor applied to grid maxima.
pub const GRID_SAFETY: f64 = 1.1;

/// Hölder data for `g'`: `|g'(x) - g'(y)| <= constant * |x - y|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderData {
    pub alpha: f64,
    pub constant: f64,
}

/// A real phase `g` with derivative oracles `g', g'', ...`.
#[derive(Clone)]
pub struct Phase {
    value: RealFn,
    derivatives: Vec<RealFn>,
    /// Derivatives beyond the last oracle vanish identically.
    polynomial: bool,
    holder: Option<HolderData>,
    description: String,
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Phase")
            .field("description", &self.description)
            .field("derivative_orders", &self.derivatives.len())
            .field("holder", &self.holder)
            .finish()
    }
}

impl Phase {
    pub fn new<G, D>(description: impl Into<String>, value: G, derivative: D) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Phase {
            value: Arc::new(value),
            derivatives: vec![Arc::new(derivative)],
            polynomial: false,
            holder: None,
            description: description.into(),
        }
    }

    /// Adds the next higher derivative oracle.
    pub fn with_derivative<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivatives.push(Arc::new(derivative));
        self
    }

    pub fn with_holder(mut self, alpha: f64, constant: f64) -> Self {
        self.holder = Some(HolderData { alpha, constant });
        self
    }

    /// Dense polynomial `sum_j coeffs[j] x^j` with every derivative oracle.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let mut layers = vec![coeffs.to_vec()];
        while layers.last().map_or(false, |c| c.len() > 1) {
            let c = layers.last().unwrap();
            layers.push(c.iter().enumerate().skip(1).map(|(j, a)| j as f64 * a).collect());
        }
        while layers.len() < 3 {
            layers.push(vec![0.0]);
        }
        let horner = |c: Vec<f64>| -> RealFn {
            Arc::new(move |x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a))
        };
        let mut iter = layers.into_iter();
        let value = horner(iter.next().unwrap());
        let derivatives: Vec<RealFn> = iter.map(horner).collect();
        let description = describe_poly(coeffs);
        Phase { value, derivatives, polynomial: true, holder: None, description }
    }

    pub fn identity() -> Self {
        Phase::polynomial(&[0.0, 1.0])
    }

    pub fn affine(slope: f64, offset: f64) -> Self {
        Phase::polynomial(&[offset, slope])
    }

    pub fn constant(c: f64) -> Self {
        Phase::polynomial(&[c])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[degree] = 1.0;
        Phase::polynomial(&c)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    /// `g^{(order)}(x)`, `order >= 1`.
    pub fn derivative(&self, order: usize, x: f64) -> Option<f64> {
        if order == 0 {
            return Some(self.eval(x));
        }
        match self.derivatives.get(order - 1) {
            Some(d) => Some(d(x)),
            None if self.polynomial => Some(0.0),
            None => None,
        }
    }

    pub fn derivative_orders(&self) -> usize {
        self.derivatives.len()
    }

    pub fn max_abs_derivative(&self, order: usize, domain: &Interval) -> Result<f64> {
        if order > self.derivatives.len() {
            return if self.polynomial { Ok(0.0) } else { Err(Error::OracleMissing { order }) };
        }
        Ok(grid(domain)
            .map(|x| self.derivative(order, x).unwrap().abs())
            .fold(0.0, f64::max))
    }

    /// `1.1 * max |g'|` over a grid of the domain.
    pub fn lipschitz_on(&self, domain: &Interval) -> f64 {
        GRID_SAFETY * self.max_abs_derivative(1, domain).expect("first derivative is required")
    }

    /// Declared Hölder data, or `alpha = 1` with `1.1 * max |g''|` when a
    /// second-derivative oracle exists.
    pub fn holder_on(&self, domain: &Interval) -> Result<HolderData> {
        if let Some(h) = self.holder {
            return Ok(h);
        }
        let c = self.max_abs_derivative(2, domain)?;
        Ok(HolderData { alpha: 1.0, constant: GRID_SAFETY * c })
    }

    /// Finite-difference check of the declared Hölder data on a grid:
    /// `|(g(x+h) - g(x))/h - g'(x)| <= C h^alpha`.
    pub fn check_holder(&self, domain: &Interval, steps: &[f64]) -> Result<bool> {
        let h = self.holder_on(domain)?;
        for &step in steps {
            for x in grid(&Interval::closed(domain.lo, domain.hi - step)) {
                let diff = (self.eval(x + step) - self.eval(x)) / step;
                let d1 = self.derivative(1, x).unwrap();
                let slack = 1e-12 * (1.0 + self.eval(x).abs()) / step;
                if (diff - d1).abs() > h.constant * step.powf(h.alpha) + slack {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub(crate) fn grid(domain: &Interval) -> impl Iterator<Item = f64> + '_ {
    let n = GRID_POINTS;
    (0..n).map(move |i| domain.lo + domain.len() * i as f64 / (n - 1) as f64)
}

fn describe_poly(coeffs: &[f64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| match j {
            0 => format!("{c}"),
            1 => format!("{c}*x"),
            _ => format!("{c}*x^{j}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_oracles() {
        let g = Phase::polynomial(&[1.0, -1.0, 0.0, 2.0]); // 1 - x + 2x^3
        assert_eq!(g.eval(2.0), 15.0);
        assert_eq!(g.derivative(1, 2.0), Some(23.0));
        assert_eq!(g.derivative(2, 2.0), Some(24.0));
        assert_eq!(g.derivative(3, 2.0), Some(12.0));
        assert_eq!(g.derivative(4, 2.0), Some(0.0));
        assert_eq!(g.derivative(9, 2.0), Some(0.0));
        assert_eq!(g.max_abs_derivative(9, &Interval::closed(0.0, 1.0)).unwrap(), 0.0);
        let c = Phase::constant(3.0);
        assert_eq!(c.derivative(1, 0.3), Some(0.0));
    }

    #[test]
    fn holder_from_second_derivative() {
        let g = Phase::monomial(2);
        let j = Interval::closed(0.0, 1.0);
        let h = g.holder_on(&j).unwrap();
        assert_eq!(h.alpha, 1.0);
        assert!((h.constant - 2.2).abs() < 1e-12);
        assert!(g.check_holder(&j, &[1e-2, 1e-3, 1e-4]).unwrap());
        assert!((g.lipschitz_on(&j) - 2.2).abs() < 1e-12);
    }

    #[test]
    fn wrong_holder_is_caught() {
        let g = Phase::new("x^2 with a bad constant", |x| x * x, |x| 2.0 * x).with_holder(1.0, 0.1);
        assert!(!g.check_holder(&Interval::closed(0.0, 1.0), &[1e-2]).unwrap());
    }

    #[test]
    fn missing_oracle() {
        let g = Phase::new("sin", f64::sin, f64::cos);
        assert_eq!(
            g.holder_on(&Interval::closed(0.0, 1.0)).unwrap_err(),
            Error::OracleMissing { order: 2 }
        );
        let g = g.with_holder(1.0, 1.0);
        assert!(g.check_holder(&Interval::closed(0.0, 1.0), &[1e-3]).unwrap());
    }
}
