use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational;

/// Emitted fractional parts keep this many bits.
const OUTPUT_BITS: u64 = 53;

/// Largest admissible per-term error, as a power of two.
pub const MAX_ERROR_LOG2: f64 = -48.0;

/// A real `x` that can be rounded down to `p` fractional bits.
pub trait PreciseReal {
    /// `floor(x 2^p)` and a bound `e` with `|x - value / 2^p| <= e 2^{-p}`.
    fn fixed_point(&self, p: u64) -> Result<(BigUint, u32)>;
    fn approx(&self) -> f64;
    fn describe(&self) -> String;
}

impl PreciseReal for BigRational {
    fn fixed_point(&self, p: u64) -> Result<(BigUint, u32)> {
        if !self.is_positive() {
            return Err(Error::NotGreaterThanOne);
        }
        let scaled = self.numer() << p;
        let q = scaled.div_floor(self.denom());
        Ok((q.to_biguint().expect("positive"), 1))
    }

    fn approx(&self) -> f64 {
        rational::to_f64(self)
    }

    fn describe(&self) -> String {
        if self.denom().bits() > 64 {
            format!("rational with {}-bit denominator (~{})", self.denom().bits(), self.approx())
        } else {
            self.to_string()
        }
    }
}

/// `mantissa / 2^frac_bits`, accurate to within `2^{-frac_bits}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub mantissa: BigUint,
    pub frac_bits: u64,
}

impl FixedPoint {
    /// Golden ratio `(1 + sqrt 5) / 2` to `frac_bits` bits.
    pub fn golden_ratio(frac_bits: u64) -> Self {
        // floor(sqrt(5 * 4^f)) = floor(sqrt 5 * 2^f)
        let five = BigUint::from(5u32) << (2 * frac_bits);
        let root = five.sqrt();
        FixedPoint { mantissa: ((BigUint::one() << frac_bits) + root) >> 1u32, frac_bits }
    }
}

impl PreciseReal for FixedPoint {
    fn fixed_point(&self, p: u64) -> Result<(BigUint, u32)> {
        if self.frac_bits < p {
            return Err(Error::InsufficientInputDigits { have: self.frac_bits, need: p });
        }
        Ok((&self.mantissa >> (self.frac_bits - p), 2))
    }

    fn approx(&self) -> f64 {
        let shift = self.mantissa.bits().saturating_sub(60);
        let top = (&self.mantissa >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(shift as i32 - self.frac_bits as i32)
    }

    fn describe(&self) -> String {
        format!("{} ({} fractional bits)", self.approx(), self.frac_bits)
    }
}

/// Working precision `P = m (ceil(N log2 ceil(x)) + guard + ceil(log2 max(1, |xi|)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionPolicy {
    pub guard_bits: u64,
    pub multiplier: u64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { guard_bits: 128, multiplier: 1 }
    }
}

impl PrecisionPolicy {
    pub fn doubled(self) -> Self {
        PrecisionPolicy { multiplier: 2 * self.multiplier, ..self }
    }

    pub fn working_bits(&self, x_approx: f64, xi: f64, n: usize) -> u64 {
        let base = (n as f64 * x_approx.ceil().log2()).ceil() as u64;
        let xi_bits = xi.abs().max(1.0).log2().ceil() as u64;
        self.multiplier * (base + self.guard_bits + xi_bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSequence {
    pub x: String,
    pub xi: f64,
    pub n: usize,
    pub working_bits: u64,
    /// `{xi x^j}` for `j = 1..=n`.
    pub fractional_parts: Vec<f64>,
    /// Largest per-term error bound, as a power of two.
    pub guaranteed_error_log2: f64,
    pub guaranteed_error: f64,
}

/// `log2(2^a + 2^b)`.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Fractional parts of `xi x^j`, `j = 1..=n`, each within `2^{-48}` of the
/// truth on the circle.
pub fn power_fractional_sequence<X: PreciseReal + ?Sized>(x: &X, xi: f64, n: usize) -> Result<PowerSequence> {
    power_fractional_sequence_with(x, xi, n, &PrecisionPolicy::default())
}

pub fn power_fractional_sequence_with<X: PreciseReal + ?Sized>(
    x: &X,
    xi: f64,
    n: usize,
    policy: &PrecisionPolicy,
) -> Result<PowerSequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    if !(xi != 0.0 && xi.is_finite()) {
        return Err(Error::InvalidArgument(format!("xi = {xi} must be finite and nonzero")));
    }
    let approx = x.approx();
    if !(approx > 1.0) {
        return Err(Error::NotGreaterThanOne);
    }
    let p = policy.working_bits(approx, xi, n);
    let (big_x, input_units) = x.fixed_point(p)?;
    if big_x <= (BigUint::one() << p) {
        return Err(Error::NotGreaterThanOne);
    }

    // xi = m 2^e exactly
    let xi_exact = rational::from_f64(xi);
    let xi_num = xi_exact.numer().clone();
    let xi_shift = xi_exact.denom().bits() - 1;
    let xi_abs_log2 = xi.abs().log2();

    let p_f = p as f64;
    let ln_x_err = (input_units as f64).log2() - p_f;
    let x_up = approx * (1.0 + 1e-12) + 1e-300;
    let log2_x = x_up.log2();
    let modulus = BigInt::one() << (p + xi_shift);

    let mut y = big_x.clone();
    let mut err_log2 = ln_x_err;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut parts = Vec::with_capacity(n);
    for j in 1..=n {
        if j > 1 {
            y = (&y * &big_x) >> p;
            // e_j <= e_{j-1} (x + e_x) + x^{j-1} e_x + 2^{-P}
            let carried = err_log2 + (x_up + ln_x_err.exp2()).log2();
            let fresh = (j - 1) as f64 * log2_x + ln_x_err;
            err_log2 = log2_add(log2_add(carried, fresh), -p_f);
        }
        let z = BigInt::from_biguint(Sign::Plus, y.clone()) * &xi_num;
        let r = z.mod_floor(&modulus);
        let bits = p + xi_shift;
        let drop = bits.saturating_sub(OUTPUT_BITS);
        let top = (r >> drop).to_f64().expect("fits");
        let frac = top * 2f64.powi(-((bits - drop) as i32));
        let term_err = log2_add(err_log2 + xi_abs_log2, -(OUTPUT_BITS as f64));
        worst = worst.max(term_err);
        parts.push(frac);
    }
    if worst > MAX_ERROR_LOG2 {
        return Err(Error::PrecisionExhausted(format!(
            "per-term error 2^{worst:.1} exceeds 2^{MAX_ERROR_LOG2} at {p} working bits"
        )));
    }
    Ok(PowerSequence {
        x: x.describe(),
        xi,
        n,
        working_bits: p,
        fractional_parts: parts,
        guaranteed_error_log2: worst,
        guaranteed_error: worst.exp2(),
    })
}

/// Distance between two points of `R / Z`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        rational::parse_exact(s).unwrap()
    }

    #[test]
    fn integer_base_has_zero_parts() {
        let s = power_fractional_sequence(&q("2"), 1.0, 100).unwrap();
        assert!(s.fractional_parts.iter().all(|&f| f == 0.0));
        assert!(s.guaranteed_error_log2 <= MAX_ERROR_LOG2);
    }

    #[test]
    fn three_halves() {
        let s = power_fractional_sequence(&q("3/2"), 1.0, 3).unwrap();
        assert_eq!(s.fractional_parts, vec![0.5, 0.25, 0.375]);
    }

    #[test]
    fn negative_and_fractional_xi() {
        // -0.5 * 1.5^2 = -1.125 -> 0.875
        let s = power_fractional_sequence(&q("1.5"), -0.5, 2).unwrap();
        assert_eq!(s.fractional_parts, vec![0.25, 0.875]);
        // 3 * 1.5 = 4.5, 3 * 2.25 = 6.75
        let s = power_fractional_sequence(&q("1.5"), 3.0, 2).unwrap();
        assert_eq!(s.fractional_parts, vec![0.5, 0.75]);
    }

    #[test]
    fn golden_ratio_against_lucas_numbers() {
        let n = 300;
        let policy = PrecisionPolicy::default();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let bits = policy.working_bits(phi, 1.0, n) + 8;
        let s = power_fractional_sequence(&FixedPoint::golden_ratio(bits), 1.0, n).unwrap();
        for (i, &f) in s.fractional_parts.iter().enumerate() {
            let j = (i + 1) as i32;
            let inv = phi.powi(-j);
            let expected = if j % 2 == 1 { inv } else { 1.0 - inv };
            assert!(circle_distance(f, expected) < 2f64.powi(-48), "n = {j}");
        }
    }

    #[test]
    fn input_digits_and_domain() {
        let short = FixedPoint { mantissa: BigUint::from(3u32) << 9u32, frac_bits: 10 };
        assert!(matches!(
            power_fractional_sequence(&short, 1.0, 10),
            Err(Error::InsufficientInputDigits { have: 10, .. })
        ));
        assert_eq!(power_fractional_sequence(&q("1"), 1.0, 3).unwrap_err(), Error::NotGreaterThanOne);
        assert_eq!(power_fractional_sequence(&q("1/2"), 1.0, 3).unwrap_err(), Error::NotGreaterThanOne);
    }

    #[test]
    fn doubling_precision_agrees() {
        let x = q("2.718281828459045235360287471352662497757");
        let a = power_fractional_sequence(&x, 1.0, 500).unwrap();
        let b = power_fractional_sequence_with(&x, 1.0, 500, &PrecisionPolicy::default().doubled()).unwrap();
        assert_eq!(b.working_bits, 2 * a.working_bits);
        for (u, v) in a.fractional_parts.iter().zip(&b.fractional_parts) {
            assert!(circle_distance(*u, *v) <= 2f64.powi(-48));
        }
    }
}
