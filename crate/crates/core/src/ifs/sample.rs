use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IteratedFunctionSystem;
use crate::rational;

/// A point drawn from `mu` through the coding map, known exactly as a
/// rational and guaranteed to lie within `2^radius_log2` of `pi(eta)`.
#[derive(Debug, Clone)]
pub struct SampledPoint {
    pub seed: u64,
    pub depth: usize,
    pub approx: f64,
    pub exact: BigRational,
    /// log2 of `|r_{eta|d}| * |J|`, the diameter of the final cylinder.
    pub radius_log2: f64,
}

/// Depth `d = ceil(bits * ln 2 / ln(1 / max|r_i|))`.
pub fn sampling_depth(ifs: &IteratedFunctionSystem, precision_bits: u32) -> usize {
    let contraction = -ifs.max_abs_ratio().ln();
    let mut d = (precision_bits as f64 * std::f64::consts::LN_2 / contraction).ceil() as usize;
    // guard against rounding in the quotient
    while (d as f64) * contraction < precision_bits as f64 * std::f64::consts::LN_2 {
        d += 1;
    }
    d.max(1)
}

/// Draws an i.i.d. `p`-distributed prefix `eta|d` and returns `f_{eta|d}(lo)`,
/// a point of the cylinder `f_{eta|d}(J)`, whose diameter is below
/// `2^{-precision_bits} |J|`. Deterministic in `seed`.
pub fn sample_point(ifs: &IteratedFunctionSystem, seed: u64, precision_bits: u32) -> SampledPoint {
    let depth = sampling_depth(ifs, precision_bits.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cumulative: Vec<f64> = ifs
        .weights()
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let letters: Vec<usize> = (0..depth)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
            cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1)
        })
        .collect();

    // Bring every map to a common denominator so the Horner recursion is
    // integer-only: f(n/d) = (a*n + b*d) / (D*d).
    let common = ifs.exact_maps().iter().fold(BigInt::one(), |acc, m| {
        acc.lcm(m.ratio.denom()).lcm(m.translation.denom())
    });
    let scaled: Vec<(BigInt, BigInt)> = ifs
        .exact_maps()
        .iter()
        .map(|m| {
            let a = m.ratio.numer() * (&common / m.ratio.denom());
            let b = m.translation.numer() * (&common / m.translation.denom());
            (a, b)
        })
        .collect();

    let start = ifs.exact_support_lo();
    let mut num = start.numer().clone();
    let mut den = start.denom().clone();
    let mut log_ratio = 0.0;
    for &l in letters.iter().rev() {
        let (a, b) = &scaled[l];
        num = a * &num + b * &den;
        den *= &common;
        log_ratio += ifs.maps()[l].ratio.abs().log2();
    }
    let exact = BigRational::new(num, den);
    SampledPoint {
        seed,
        depth,
        approx: rational::to_f64(&exact),
        exact,
        radius_log2: log_ratio + ifs.support().len().log2(),
    }
}
