//! Sparse integer polynomials on `[a, b]` with `a > 1`: root isolation,
//! small-value coverings and finite-scale non-flatness certificates.

mod covering;
mod nonflat;
mod roots;

pub use covering::{covering_intervals, small_value_intervals, small_value_min_q, Covering};
pub use nonflat::{nonflat_certificate, NonflatCertificate, NonflatOutcome, NonflatRefutation};
pub use roots::real_roots;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// `sum_j l_j x^{u_j}` with nonzero integer coefficients and strictly
/// decreasing exponents, tagged with the family `F_{k,N}` it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparsePolynomial {
    terms: Vec<(i64, u32)>,
    k: usize,
    n: u32,
}

impl SparsePolynomial {
    /// Builds a member of `F_{k,N}`: at most `k` terms, exponents at most
    /// `N`, coefficients at most `N^4` in absolute value.
    pub fn new(terms: Vec<(i64, u32)>, k: usize, n: u32) -> Result<Self> {
        let p = SparsePolynomial { terms: normalize(terms), k, n };
        p.check_family()?;
        Ok(p)
    }

    /// Polynomial with the smallest family bounds `k`, `N` its terms allow;
    /// the coefficient bound is not enforced.
    pub fn from_terms(terms: Vec<(i64, u32)>) -> Self {
        let terms = normalize(terms);
        let k = terms.len();
        let n = terms.first().map_or(0, |t| t.1);
        SparsePolynomial { terms, k, n }
    }

    /// Parses `"coeff:exp,coeff:exp,..."`.
    pub fn parse_terms(text: &str) -> Result<Vec<(i64, u32)>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(',')
            .map(|item| {
                let (c, e) = item
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidArgument(format!("term '{item}' is not coeff:exp")))?;
                let c: i64 = c
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad coefficient in '{item}'")))?;
                let e: u32 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad exponent in '{item}'")))?;
                Ok((c, e))
            })
            .collect()
    }

    fn check_family(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::NotInFamily { k: self.k, n: self.n, reason });
        if self.terms.len() > self.k {
            return fail(format!("{} terms", self.terms.len()));
        }
        let bound = (self.n as i128).pow(4);
        for &(c, u) in &self.terms {
            if u > self.n {
                return fail(format!("exponent {u}"));
            }
            if (c as i128).abs() > bound {
                return fail(format!("coefficient {c}"));
            }
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(i64, u32)] {
        &self.terms
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading exponent `u_1`, or 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.1)
    }

    pub(crate) fn real_terms(&self) -> Terms {
        Terms {
            coefs: self.terms.iter().map(|t| t.0 as f64).collect(),
            exps: self.terms.iter().map(|t| t.1 as i64).collect(),
        }
    }

    /// `h(x)` in double precision; overflows for large degrees.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(c, u)| c as f64 * x.powi(u as i32)).sum()
    }

    /// `ln |h(x)|` for `x > 1`, safe for any degree.
    pub fn ln_abs(&self, x: f64) -> f64 {
        let t = self.real_terms();
        let s = t.eval_scaled(x);
        s.value.abs().ln() + t.lead() as f64 * x.ln()
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(c, u)| format!("{c}:{u}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn normalize(mut terms: Vec<(i64, u32)>) -> Vec<(i64, u32)> {
    terms.sort_by(|a, b| b.1.cmp(&a.1));
    let mut out: Vec<(i64, u32)> = Vec::with_capacity(terms.len());
    for (c, u) in terms {
        match out.last_mut() {
            Some(last) if last.1 == u => last.0 += c,
            _ => out.push((c, u)),
        }
    }
    out.retain(|t| t.0 != 0);
    out
}

/// `h(x) = (value +- error) * x^lead`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    pub value: f64,
    pub error: f64,
}

/// Real-coefficient sparse polynomial used internally; exponents
/// decreasing, evaluated for `x > 1` relative to `x^lead`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Terms {
    pub coefs: Vec<f64>,
    pub exps: Vec<i64>,
}

impl Terms {
    pub fn len(&self) -> usize {
        self.coefs.len()
    }

    pub fn lead(&self) -> i64 {
        self.exps.first().copied().unwrap_or(0)
    }

    /// `h / x^{min exponent}`.
    pub fn deflate(&self) -> Terms {
        let m = self.exps.last().copied().unwrap_or(0);
        Terms { coefs: self.coefs.clone(), exps: self.exps.iter().map(|e| e - m).collect() }
    }

    pub fn derivative(&self) -> Terms {
        let mut coefs = Vec::new();
        let mut exps = Vec::new();
        for (&c, &e) in self.coefs.iter().zip(&self.exps) {
            if e != 0 {
                coefs.push(c * e as f64);
                exps.push(e - 1);
            }
        }
        Terms { coefs, exps }
    }

    /// Terms with absolute coefficients times exponents: a bound for
    /// `|h'(y)|` that is increasing in `y > 0`.
    pub fn derivative_majorant(&self) -> Terms {
        let d = self.derivative();
        Terms { coefs: d.coefs.iter().map(|c| c.abs()).collect(), exps: d.exps }
    }

    pub fn eval_scaled(&self, x: f64) -> Scaled {
        let lead = self.lead();
        let ln_x = x.ln();
        let mut value = 0.0;
        let mut magnitude = 0.0;
        let mut weighted = 0.0;
        for (&c, &e) in self.coefs.iter().zip(&self.exps) {
            let d = (e - lead) as f64;
            let term = c * (d * ln_x).exp();
            value += term;
            magnitude += term.abs();
            weighted += term.abs() * (d.abs() * ln_x + 2.0);
        }
        let error = 2.0 * EPS * weighted + (self.len() as f64 + 1.0) * EPS * magnitude;
        Scaled { value, error }
    }

    pub fn sign(&self, x: f64) -> f64 {
        let v = self.eval_scaled(x).value;
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// `ln` of the (nonnegative-coefficient) sum at `x`.
    pub fn ln_value(&self, x: f64) -> f64 {
        if self.coefs.is_empty() {
            return f64::NEG_INFINITY;
        }
        self.eval_scaled(x).value.ln() + self.lead() as f64 * x.ln()
    }
}
