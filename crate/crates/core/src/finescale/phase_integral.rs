use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::dd::Dd;
use crate::error::{Error, Result};
use crate::measure::{cis, SelfSimilarMeasure};
use crate::poly::SparsePolynomial;

/// Bits of the phase that must survive after reducing modulo one.
const PHASE_BITS: f64 = 40.0;

/// Usable significand bits of a double-double.
const DD_BITS: f64 = 104.0;

/// Frontier size at which subtrees are handed to workers.
const PARALLEL_FRONTIER: usize = 256;

/// `g(x) = sum_j l_j (x^{u_j} - x^{u_{j+1}}) + sum_j m_j (x^{v_j} - x^{v_{j+1}})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationPhase {
    pub l: Vec<i64>,
    pub m: Vec<i64>,
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl CorrelationPhase {
    pub fn new(l: Vec<i64>, m: Vec<i64>, u: Vec<u32>, v: Vec<u32>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if l.len() != m.len() {
            return bad(format!("l has {} entries but m has {}", l.len(), m.len()));
        }
        if !l.is_empty() && (u.len() != l.len() + 1 || v.len() != l.len() + 1) {
            return bad(format!("need k = {} exponents in u and v", l.len() + 1));
        }
        if l.is_empty() && (u.len() > 1 || v.len() > 1) {
            return bad("exponents given without coefficients".into());
        }
        for (name, e) in [("u", &u), ("v", &v)] {
            if e.windows(2).any(|w| w[0] <= w[1]) {
                return bad(format!("{name} must be strictly decreasing"));
            }
        }
        if l.iter().chain(&m).any(|&c| c == 0) {
            return bad("coefficients must be nonzero".into());
        }
        Ok(CorrelationPhase { l, m, u, v })
    }

    pub fn zero() -> Self {
        CorrelationPhase { l: Vec::new(), m: Vec::new(), u: Vec::new(), v: Vec::new() }
    }

    /// `k`, the number of exponents.
    pub fn k(&self) -> usize {
        self.l.len() + 1
    }

    /// Checks `0 < |l_j|, |m_j| <= N^{1 + epsilon}`.
    pub fn check_bounds(&self, n: u32, epsilon: f64) -> Result<()> {
        let cap = (n as f64).powf(1.0 + epsilon);
        match self.l.iter().chain(&self.m).find(|c| c.unsigned_abs() as f64 > cap) {
            Some(c) => Err(Error::InvalidArgument(format!("coefficient {c} exceeds N^(1+eps) = {cap}"))),
            None => Ok(()),
        }
    }

    /// `u_1 > v_1`, or `u_1 = v_1` with `l_1 + m_1 != 0`.
    pub fn leading_term_ok(&self) -> bool {
        match (self.u.first(), self.v.first()) {
            (Some(u1), Some(v1)) => u1 > v1 || (u1 == v1 && self.l[0] + self.m[0] != 0),
            _ => false,
        }
    }

    pub fn polynomial(&self) -> SparsePolynomial {
        let mut terms = Vec::new();
        for (coefs, exps) in [(&self.l, &self.u), (&self.m, &self.v)] {
            for (j, &c) in coefs.iter().enumerate() {
                terms.push((c, exps[j]));
                terms.push((-c, exps[j + 1]));
            }
        }
        SparsePolynomial::from_terms(terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseIntegral {
    pub value: Complex64,
    pub error_bound: f64,
    pub leaves: usize,
    pub max_depth: usize,
}

struct Poly {
    coefs: Vec<f64>,
    exps: Vec<u32>,
}

impl Poly {
    fn value_and_slope(&self, x: Dd) -> (Dd, Dd) {
        let mut g = Dd::ZERO;
        let mut d = Dd::ZERO;
        for (&c, &u) in self.coefs.iter().zip(&self.exps) {
            if u == 0 {
                g = g + Dd::from_f64(c);
                continue;
            }
            let p = x.powu(u - 1);
            d = d + p.mul_f64(c * u as f64);
            g = g + (p * x).mul_f64(c);
        }
        (g, d)
    }

    /// Upper bound for `|g''|` on `(0, x]`.
    fn second_majorant(&self, x: f64) -> f64 {
        self.coefs
            .iter()
            .zip(&self.exps)
            .filter(|(_, &u)| u >= 2)
            .map(|(c, &u)| c.abs() * (u as f64) * (u as f64 - 1.0) * x.powi(u as i32 - 2))
            .sum::<f64>()
            * (1.0 + 1e-12)
    }
}

struct Node {
    ratio: Dd,
    translation: Dd,
    mass: f64,
    depth: usize,
}

struct Integrator<'a> {
    measure: &'a SelfSimilarMeasure,
    poly: Poly,
    maps: Vec<(Dd, Dd, f64)>,
    a: f64,
    b: f64,
    mid: Dd,
    tolerance: f64,
    fourier_tolerance: f64,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    value: Complex64,
    error: f64,
    leaves: usize,
    max_depth: usize,
}

impl Acc {
    fn merge(self, o: Acc) -> Acc {
        Acc {
            value: self.value + o.value,
            error: self.error + o.error,
            leaves: self.leaves + o.leaves,
            max_depth: self.max_depth.max(o.max_depth),
        }
    }
}

impl Integrator<'_> {
    fn linearization_error(&self, node: &Node) -> f64 {
        let r = node.ratio.to_f64().abs();
        let t = node.translation.to_f64();
        let x_max = (t + r * self.a).abs().max((t + r * self.b).abs()) + r * (self.b - self.a) * 1e-12;
        let h = 0.5 * r * (self.b - self.a);
        PI * self.poly.second_majorant(x_max) * h * h
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        self.maps
            .iter()
            .map(|&(r, t, p)| Node {
                ratio: node.ratio * r,
                translation: node.translation + node.ratio * t,
                mass: node.mass * p,
                depth: node.depth + 1,
            })
            .collect()
    }

    /// `p e^{2 pi i (g(c) - g'(c) r x0)} mu_hat(g'(c) r)`, `c = t + r x0`.
    fn leaf(&self, node: &Node) -> Result<Acc> {
        let c = node.translation + node.ratio * self.mid;
        let (g, slope) = self.poly.value_and_slope(c);
        let s = slope * node.ratio;
        let phase = (g - s * self.mid).frac();
        let f = self.measure.fourier(s.to_f64(), self.fourier_tolerance)?;
        let lin = self.linearization_error(node);
        Ok(Acc {
            value: node.mass * cis(2.0 * PI * phase) * f.value,
            error: node.mass * (lin + f.error_bound),
            leaves: 1,
            max_depth: node.depth,
        })
    }

    fn subtree(&self, node: Node, budget: usize) -> Result<Acc> {
        if self.linearization_error(&node) <= self.tolerance {
            return self.leaf(&node);
        }
        let mut acc = Acc::default();
        for child in self.children(&node) {
            acc = acc.merge(self.subtree(child, budget)?);
            if acc.leaves > budget {
                return Err(Error::BudgetExceeded(format!("phase integral needs more than {budget} leaves")));
            }
        }
        Ok(acc)
    }
}

/// `int e^{2 pi i g(x)} dmu(x)` for `mu` on `[a, b]`, `a > 1`, with an
/// absolute error bound.
///
/// Cylinders are refined until the quadratic Taylor remainder of `g` costs
/// at most `tolerance / 2` in phase per unit mass; on each cylinder `g` is
/// replaced by its tangent line at the cylinder center, which reduces the
/// piece to a value of `mu_hat`.
pub fn correlation_phase_integral(
    measure: &SelfSimilarMeasure,
    phase: &CorrelationPhase,
    tolerance: f64,
) -> Result<PhaseIntegral> {
    let support = measure.support();
    let (a, b) = (support.lo, support.hi);
    if !(a > 1.0 && b > a) {
        return Err(Error::DegenerateRange { a, b });
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} must be positive")));
    }
    let sparse = phase.polynomial();
    if sparse.is_zero() {
        return Ok(PhaseIntegral { value: Complex64::new(1.0, 0.0), error_bound: 0.0, leaves: 1, max_depth: 0 });
    }
    let poly = Poly {
        coefs: sparse.terms().iter().map(|t| t.0 as f64).collect(),
        exps: sparse.terms().iter().map(|t| t.1).collect(),
    };
    let size: f64 = poly
        .coefs
        .iter()
        .zip(&poly.exps)
        .map(|(c, &u)| c.abs() * (u.max(1) as f64) * b.powi(u as i32))
        .sum();
    let needed = size.log2() + PHASE_BITS;
    if needed > DD_BITS {
        return Err(Error::PrecisionExhausted(format!(
            "phase of size 2^{:.1} needs {needed:.0} bits; double-double holds {DD_BITS}",
            size.log2()
        )));
    }

    let ifs = measure.ifs();
    let maps = ifs
        .exact_maps()
        .iter()
        .zip(ifs.weights())
        .map(|(m, &p)| (Dd::from_rational(&m.ratio), Dd::from_rational(&m.translation), p))
        .collect();
    let integ = Integrator {
        measure,
        poly,
        maps,
        a,
        b,
        mid: Dd::from_f64(0.5 * (a + b)),
        tolerance: 0.5 * tolerance,
        fourier_tolerance: 0.25 * tolerance,
    };
    let budget = measure.word_budget();

    let mut frontier = vec![Node { ratio: Dd::ONE, translation: Dd::ZERO, mass: 1.0, depth: 0 }];
    let mut acc = Acc::default();
    while !frontier.is_empty() && frontier.len() < PARALLEL_FRONTIER {
        let mut next = Vec::new();
        for node in frontier {
            if integ.linearization_error(&node) <= integ.tolerance {
                acc = acc.merge(integ.leaf(&node)?);
            } else {
                next.extend(integ.children(&node));
            }
        }
        frontier = next;
    }
    let rest = frontier
        .into_par_iter()
        .map(|node| integ.subtree(node, budget))
        .try_reduce(Acc::default, |x, y| Ok(x.merge(y)))?;
    let total = acc.merge(rest);
    if total.leaves > budget {
        return Err(Error::BudgetExceeded(format!("phase integral needs more than {budget} leaves")));
    }
    let rounding = total.leaves as f64 * 16.0 * f64::EPSILON;
    Ok(PhaseIntegral {
        value: total.value,
        error_bound: total.error + rounding,
        leaves: total.leaves,
        max_depth: total.max_depth,
    })
}
