//! Exact parsing of decimal and fraction strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"0.25"`, `"-1.5e-3"`, `"1/3"` or `"7"` into an exact rational.
pub fn parse_exact(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Config("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_exact(num)?;
        let d = parse_exact(den)?;
        if d.is_zero() {
            return Err(Error::Config(format!("zero denominator in {text:?}")));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(|| Error::Config(format!("not a decimal number: {text:?}")))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Smallest integer not below `x`.
pub fn ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

pub fn is_positive(x: &BigRational) -> bool {
    x.is_positive()
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_forms() {
        assert_eq!(parse_exact("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_exact("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_exact("-1.5e-3").unwrap(), r(-3, 2000));
        assert_eq!(parse_exact("7").unwrap(), r(7, 1));
        assert_eq!(parse_exact(".5").unwrap(), r(1, 2));
        assert_eq!(parse_exact("4/3").unwrap(), r(4, 3));
        assert_eq!(parse_exact("2.5E2").unwrap(), r(250, 1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_exact("").is_err());
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("1.2.3").is_err());
        assert!(parse_exact("-").is_err());
    }
}
