//! Exact rational helpers shared by the atomic code paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational used for atom weights and exact geometry.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact value of a finite double.
pub fn from_f64_exact(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.125"` or `"1e-3"`.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{whole}{frac}");
    let numer: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().ok()?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Interprets a JSON number through its shortest round-trip decimal form, so
/// that `0.1` means one tenth rather than the nearest binary fraction.
pub fn from_f64_decimal(v: f64) -> Option<Rational> {
    if !v.is_finite() {
        return None;
    }
    parse_decimal(&format!("{v:e}"))
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn best_approximation(value: f64, max_den: u64) -> Option<(i128, u128)> {
    if !value.is_finite() || max_den == 0 {
        return None;
    }
    let negative = value < 0.0;
    let target = value.abs();
    let (mut p0, mut q0, mut p1, mut q1): (u128, u128, u128, u128) = (0, 1, 1, 0);
    let mut x = target;
    let limit = max_den as u128;
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e30 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a_int.checked_mul(q1)?.checked_add(q0)?;
        if q2 > limit {
            // Largest semiconvergent that still fits.
            let k = (limit - q0) / q1.max(1);
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            let err_semi = (target - ps as f64 / qs as f64).abs();
            let err_conv = (target - p1 as f64 / q1 as f64).abs();
            let (p, q) = if qs > 0 && err_semi < err_conv {
                (ps, qs)
            } else {
                (p1, q1)
            };
            return Some((if negative { -(p as i128) } else { p as i128 }, q));
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-18 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some((if negative { -(p1 as i128) } else { p1 as i128 }, q1))
}

pub fn from_i128_ratio(p: i128, q: u128) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn decimal_reading_of_doubles() {
        assert_eq!(from_f64_decimal(0.1).unwrap(), ratio(1, 10));
        assert_eq!(from_f64_decimal(2.0).unwrap(), int(2));
        assert_eq!(from_f64_decimal(1e-7).unwrap(), ratio(1, 10_000_000));
        assert_ne!(from_f64_exact(0.1).unwrap(), ratio(1, 10));
    }

    #[test]
    fn formatting_round_trips() {
        for r in [ratio(1, 10), int(-3), ratio(22, 7)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn continued_fractions_recover_small_ratios() {
        assert_eq!(best_approximation(1.0 / 3.0, 100), Some((1, 3)));
        assert_eq!(best_approximation(-22.0 / 7.0, 100), Some((-22, 7)));
        assert_eq!(best_approximation(0.0, 10), Some((0, 1)));
        assert_eq!(best_approximation(std::f64::consts::PI, 10), Some((22, 7)));
    }
}
