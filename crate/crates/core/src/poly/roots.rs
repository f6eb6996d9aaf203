use super::{SparsePolynomial, Terms};
use crate::error::{Error, Result};

/// Shrinks `[lo, hi]` around a sign change of `f` to adjacent doubles.
/// `f(lo)` and `f(hi)` must have opposite signs; the returned bracket keeps
/// them.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let s_lo = f(lo).signum();
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = f(mid);
        if s == 0.0 {
            return (mid, mid);
        }
        if s.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Brackets of the real roots of `h` in `[a, b]`, `a > 1`, in increasing
/// order. Roots of `h'` split `[a, b]` into monotone pieces, each holding at
/// most one sign change.
pub(crate) fn root_brackets(h: &Terms, a: f64, b: f64) -> Vec<(f64, f64)> {
    let g = h.deflate();
    if g.len() <= 1 {
        return Vec::new();
    }
    let critical: Vec<f64> = root_brackets(&g.derivative(), a, b)
        .into_iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut cuts = vec![a];
    cuts.extend(critical.into_iter().filter(|&c| c > a && c < b));
    cuts.push(b);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (sp, sq) = (g.sign(p), g.sign(q));
        let bracket = if sp == 0.0 {
            Some((p, p))
        } else if sq == 0.0 {
            Some((q, q))
        } else if sp != sq {
            Some(bisect(|x| g.sign(x), p, q))
        } else {
            None
        };
        if let Some(br) = bracket {
            match out.last_mut() {
                Some(last) if br.0 <= last.1 => last.1 = last.1.max(br.1),
                _ => out.push(br),
            }
        }
    }
    out
}

/// Real roots of `h` in `[a, b]` for `1 < a < b`.
pub fn real_roots(poly: &SparsePolynomial, a: f64, b: f64) -> Result<Vec<f64>> {
    if !(a > 1.0 && b > a) {
        return Err(Error::DegenerateRange { a, b });
    }
    Ok(root_brackets(&poly.real_terms(), a, b).into_iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect())
}
