//! Scalar abstraction shared by the polynomial layer and the LP kernel.
//!
//! Three fields are supported: `f32`, `f64` and exact rationals
//! ([`Rational`]). Polynomial data is usually kept exact and converted with
//! [`Scalar::from_rational`] when it enters a floating point solver.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Ordered field usable as a coefficient and as the LP arithmetic.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Nearest representable value of an exact rational.
    fn from_rational(q: &Rational) -> Self;

    /// Exact rational value, `None` for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;

    fn to_f64(&self) -> f64;

    /// Magnitude below which a pivot element is treated as zero.
    fn pivot_tolerance() -> Self;

    /// Default feasibility/optimality tolerance.
    fn default_tolerance() -> Self;

    /// Serialized form: exact `p/q` for rationals, 12 significant digits
    /// for floats.
    fn to_decimal_string(&self) -> String;

    fn from_integer(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the scalar type")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_rational(&self) -> Option<Rational> {
        BigRational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn pivot_tolerance() -> Self {
        1e-9
    }

    fn default_tolerance() -> Self {
        1e-8
    }

    fn to_decimal_string(&self) -> String {
        format_significant(*self, 12)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q) as f32
    }

    fn to_rational(&self) -> Option<Rational> {
        BigRational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn pivot_tolerance() -> Self {
        1e-6
    }

    fn default_tolerance() -> Self {
        1e-4
    }

    fn to_decimal_string(&self) -> String {
        format_significant(*self as f64, 7)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn pivot_tolerance() -> Self {
        Rational::zero()
    }

    fn default_tolerance() -> Self {
        Rational::zero()
    }

    fn to_decimal_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Converts without overflowing when numerator and denominator are huge.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(q) {
        if v.is_finite() {
            return v;
        }
    }
    let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
    if shift <= 0 {
        return f64::NAN;
    }
    let n = q.numer() >> (shift as usize);
    let d = q.denom() >> (shift as usize);
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Formats with `digits` significant digits, trimming trailing zeros.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), v);
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    if (-5..15).contains(&exp) {
        // Plain notation from the rounded mantissa so no digits reappear.
        let negative = mantissa.starts_with('-');
        let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        let point = exp + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits_only)
        } else if point as usize >= digits_only.len() {
            format!(
                "{}{}",
                digits_only,
                "0".repeat(point as usize - digits_only.len())
            )
        } else {
            let (a, b) = digits_only.split_at(point as usize);
            format!("{a}.{b}")
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Parses `"3"`, `"-2/3"`, `"0.125"`, `"1.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if negative { -value } else { value })
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn factorial(k: u32) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("2/3"), Some(rat(2, 3)));
        assert_eq!(parse_rational("-0.125"), Some(rat(-1, 8)));
        assert_eq!(parse_rational("1.5e-3"), Some(rat(3, 2000)));
        assert_eq!(parse_rational("4"), Some(rat(4, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(0.4, 12), "0.4");
        assert_eq!(format_significant(-2.0, 12), "-2");
        assert_eq!(format_significant(1234.5, 12), "1234.5");
        assert_eq!(format_significant(1.0e-9, 12), "1e-9");
        assert_eq!(format_significant(2.5e20, 12), "2.5e20");
    }

    #[test]
    fn rational_strings_are_exact() {
        assert_eq!(rat(2, 5).to_decimal_string(), "2/5");
        assert_eq!(rat(-3, 1).to_decimal_string(), "-3");
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let q = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&q) - 3.0).abs() < 1e-12);
    }
}
