use serde::Serialize;

use super::roots::{bisect, root_brackets};
use super::{SparsePolynomial, Terms};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Step cap for the certification scan.
const MAX_CERTIFICATION_STEPS: usize = 5_000_000;

/// Intervals covering `{x in [a, b] : |h(x)| < threshold}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Covering {
    pub intervals: Vec<Interval>,
    /// May underflow to zero; `ln_threshold` is exact.
    pub threshold: f64,
    pub ln_threshold: f64,
    /// Largest interval diameter.
    pub sigma_scale: f64,
    /// `sigma` with `sigma_scale = a^{-N^sigma}`, when defined.
    pub sigma: Option<f64>,
    /// Diameter bound claimed for the intervals, if any.
    pub diameter_bound: Option<f64>,
    /// Whether the scan proved `|h| >= threshold` off the intervals.
    pub certified: bool,
    pub certification_steps: usize,
    /// Steps where the Lipschitz step fell below double spacing and the
    /// next double was checked instead.
    pub resolution_limited_steps: usize,
    /// First point where certification failed.
    pub witness: Option<f64>,
}

/// Merged closed intervals containing `{|h| < 2T}`, `T = e^{ln_t}`, with
/// endpoints where `|h| >= 2T` holds up to evaluation error.
fn sublevel_intervals(h: &Terms, a: f64, b: f64, ln_t: f64) -> Vec<(f64, f64)> {
    let lead = h.lead() as f64;
    let ln_2t = ln_t + std::f64::consts::LN_2;
    let tau = |x: f64| (ln_2t - lead * x.ln()).exp();
    // below(x) < 0 iff h(x) may be < 2T; above(x) > 0 iff h(x) may be > -2T
    let below = |x: f64| {
        let s = h.eval_scaled(x);
        s.value - s.error - tau(x)
    };
    let above = |x: f64| {
        let s = h.eval_scaled(x);
        -(s.value + s.error + tau(x))
    };

    let mut cuts = vec![a];
    cuts.extend(
        root_brackets(&h.derivative(), a, b)
            .into_iter()
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .filter(|&c| c > a && c < b),
    );
    cuts.push(b);

    let side = |f: &dyn Fn(f64) -> f64, p: f64, q: f64| -> Option<(f64, f64)> {
        let (fp, fq) = (f(p) < 0.0, f(q) < 0.0);
        match (fp, fq) {
            (true, true) => Some((p, q)),
            (false, false) => None,
            (true, false) => Some((p, bisect(f, p, q).1)),
            (false, true) => Some((bisect(f, p, q).0, q)),
        }
    };

    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (Some(s1), Some(s2)) = (side(&below, p, q), side(&above, p, q)) else {
            continue;
        };
        let (lo, hi) = (s1.0.max(s2.0), s1.1.min(s2.1));
        if lo > hi {
            continue;
        }
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

struct Certification {
    certified: bool,
    steps: usize,
    resolution_steps: usize,
    witness: Option<f64>,
}

/// Walks each gap between intervals, stepping by `margin / Lip` where
/// `margin = |h(x)| - err - T` and `Lip` bounds `|h'|` over the step.
fn certify(h: &Terms, a: f64, b: f64, ln_t: f64, cover: &[(f64, f64)]) -> Certification {
    let lead = h.lead() as f64;
    let majorant = h.derivative_majorant();
    let mut gaps = Vec::new();
    let mut start = a;
    for &(lo, hi) in cover {
        if lo > start {
            gaps.push((start, lo));
        }
        start = start.max(hi);
    }
    if start < b || cover.is_empty() {
        gaps.push((start, b));
    }
    let mut steps = 0;
    let mut resolution_steps = 0;
    for (lo, hi) in gaps {
        let mut x = lo;
        let mut guess = hi - lo;
        loop {
            steps += 1;
            if steps > MAX_CERTIFICATION_STEPS {
                return Certification { certified: false, steps, resolution_steps, witness: Some(x) };
            }
            let ln_x = x.ln();
            let s = h.eval_scaled(x);
            let margin = s.value.abs() - s.error - (ln_t - lead * ln_x).exp();
            if !(margin > 0.0) {
                return Certification { certified: false, steps, resolution_steps, witness: Some(x) };
            }
            if x >= hi {
                break;
            }
            let ln_margin = margin.ln() + lead * ln_x;
            let delta = guess.min(hi - x);
            let step = (ln_margin - majorant.ln_value(x + delta)).exp();
            let advance = if step >= delta {
                delta
            } else {
                // the majorant is increasing, so a shorter step is still valid
                (ln_margin - majorant.ln_value(x + step)).exp().min(delta)
            };
            // below double resolution, consecutive doubles are checked directly
            let ulp = next_up(x) - x;
            if advance < ulp {
                resolution_steps += 1;
            }
            let advance = advance.max(ulp);
            x = (x + advance).min(hi);
            guess = 2.0 * advance;
        }
    }
    Certification { certified: true, steps, resolution_steps, witness: None }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

fn build(
    poly: &SparsePolynomial,
    a: f64,
    b: f64,
    ln_t: f64,
    n_for_sigma: f64,
    diameter_bound: Option<f64>,
) -> Covering {
    let h = poly.real_terms();
    let (cover, cert) = if poly.is_zero() {
        let cert = Certification { certified: true, steps: 0, resolution_steps: 0, witness: None };
        (vec![(a, b)], cert)
    } else {
        let cover = sublevel_intervals(&h, a, b, ln_t);
        let cert = certify(&h, a, b, ln_t, &cover);
        (cover, cert)
    };
    let sigma_scale = cover.iter().map(|c| c.1 - c.0).fold(0.0, f64::max);
    let sigma = if sigma_scale > 0.0 && n_for_sigma > 1.0 {
        let s = (-sigma_scale.ln() / a.ln()).ln() / n_for_sigma.ln();
        s.is_finite().then_some(s)
    } else {
        None
    };
    Covering {
        intervals: cover.into_iter().map(|(lo, hi)| Interval::closed(lo, hi)).collect(),
        threshold: ln_t.exp(),
        ln_threshold: ln_t,
        sigma_scale,
        sigma,
        diameter_bound,
        certified: cert.certified,
        certification_steps: cert.steps,
        resolution_limited_steps: cert.resolution_steps,
        witness: cert.witness,
    }
}

/// Covers `{x in [a, b] : |h(x)| < a^{u_1 - N^epsilon}}` by at most
/// `2k + 2` closed intervals and certifies the bound off them.
pub fn covering_intervals(poly: &SparsePolynomial, a: f64, b: f64, epsilon: f64) -> Result<Covering> {
    if !(a > 1.0 && b > a) {
        return Err(Error::DegenerateRange { a, b });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} not in (0, 1)")));
    }
    poly.check_family()?;
    let n = poly.n() as f64;
    let ln_t = (poly.degree() as f64 - n.powf(epsilon)) * a.ln();
    Ok(build(poly, a, b, ln_t, n, None))
}

/// Smallest admissible `q` is anything above `2 (1 + log_a 2 + log_a 3)`.
pub fn small_value_min_q(a: f64) -> f64 {
    2.0 * (1.0 + 2f64.ln() / a.ln() + 3f64.ln() / a.ln())
}

/// Covers `{x in [a, b] : |P(x)| < a^{-(mq)^2}}`, `m = deg P`, by at most
/// `2k + 2` intervals meant to have diameter at most `a^{-mq}`.
pub fn small_value_intervals(poly: &SparsePolynomial, a: f64, b: f64, q: f64) -> Result<Covering> {
    if !(a > 1.0 && b > a) {
        return Err(Error::DegenerateRange { a, b });
    }
    let min = small_value_min_q(a);
    if !(q > min) {
        return Err(Error::QTooSmall { q, min });
    }
    let m = poly.degree() as f64;
    let ln_t = -(m * q).powi(2) * a.ln();
    let bound = (-m * q * a.ln()).exp();
    if poly.degree() == 0 && !poly.is_zero() {
        return Ok(Covering {
            intervals: Vec::new(),
            threshold: ln_t.exp(),
            ln_threshold: ln_t,
            sigma_scale: 0.0,
            sigma: None,
            diameter_bound: Some(bound),
            certified: true,
            certification_steps: 0,
            resolution_limited_steps: 0,
            witness: None,
        });
    }
    Ok(build(poly, a, b, ln_t, poly.n() as f64, Some(bound)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::real_roots;

    fn grid_min_outside(poly: &SparsePolynomial, c: &Covering, a: f64, b: f64, step: f64) -> f64 {
        let n = ((b - a) / step).round() as usize;
        let mut worst = f64::INFINITY;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            if c.intervals.iter().any(|iv| iv.contains(x)) {
                continue;
            }
            worst = worst.min(poly.ln_abs(x) - c.ln_threshold);
        }
        worst
    }

    #[test]
    fn pure_power_needs_no_intervals() {
        let p = SparsePolynomial::new(vec![(1, 20)], 1, 20).unwrap();
        let c = covering_intervals(&p, 2.0, 3.0, 0.5).unwrap();
        assert!(c.intervals.is_empty());
        assert!(c.certified);
    }

    #[test]
    fn tenth_power_minus_3000() {
        let p = SparsePolynomial::new(vec![(1, 10), (-3000, 0)], 2, 10).unwrap();
        let c = covering_intervals(&p, 2.0, 3.0, 0.5).unwrap();
        assert_eq!(c.intervals.len(), 1);
        assert!(c.intervals[0].contains(3000f64.powf(0.1)));
        assert!(c.certified);
        assert!(grid_min_outside(&p, &c, 2.0, 3.0, 1e-6) >= 0.0);
    }

    #[test]
    fn root_at_left_endpoint() {
        let p = SparsePolynomial::new(vec![(1, 12), (-2, 11)], 2, 12).unwrap();
        let c = covering_intervals(&p, 2.0, 3.0, 0.5).unwrap();
        assert_eq!(c.intervals.len(), 1);
        assert_eq!(c.intervals[0].lo, 2.0);
        assert!(c.certified);
        assert!(grid_min_outside(&p, &c, 2.0, 3.0, 1e-6) >= 0.0);
    }

    #[test]
    fn larger_epsilon_never_grows_the_cover() {
        let p = SparsePolynomial::new(vec![(64, 3), (-480, 2), (1196, 1), (-990, 0)], 4, 6).unwrap();
        let mut last = f64::INFINITY;
        for eps in [0.2, 0.5, 0.8, 0.95] {
            let c = covering_intervals(&p, 2.0, 3.0, eps).unwrap();
            let measure: f64 = c.intervals.iter().map(|i| i.len()).sum();
            assert!(measure <= last + 1e-15);
            last = measure;
            assert!(c.intervals.len() <= 2 * p.k() + 2);
            for r in real_roots(&p, 2.0, 3.0).unwrap() {
                assert!(c.intervals.iter().any(|i| i.contains(r)));
            }
        }
    }

    #[test]
    fn argument_errors() {
        let p = SparsePolynomial::new(vec![(1, 3)], 1, 3).unwrap();
        assert!(matches!(covering_intervals(&p, 1.0, 3.0, 0.5), Err(Error::DegenerateRange { .. })));
        assert!(covering_intervals(&p, 2.0, 3.0, 1.0).is_err());
        assert!(matches!(small_value_intervals(&p, 2.0, 3.0, 7.0), Err(Error::QTooSmall { .. })));
    }

    #[test]
    fn small_value_constant_and_linear() {
        let one = SparsePolynomial::from_terms(vec![(1, 0)]);
        assert!(small_value_intervals(&one, 2.0, 3.0, 8.0).unwrap().intervals.is_empty());
        let lin = SparsePolynomial::from_terms(vec![(2, 1), (-5, 0)]);
        let c = small_value_intervals(&lin, 2.0, 3.0, 8.0).unwrap();
        assert_eq!(c.intervals.len(), 1);
        assert!(c.intervals[0].contains(2.5));
        assert!(c.sigma_scale <= c.diameter_bound.unwrap());
        assert!(c.certified);
    }
}
