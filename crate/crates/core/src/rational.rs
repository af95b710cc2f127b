//! Exact rational numbers.
//!
//! Every fractional quantity in the crate (demands, arc loads, flow amounts,
//! throughput values) is a [`Rational`]: an arbitrary-precision fraction kept
//! in lowest terms with a positive denominator.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Builds `num / den` from machine integers.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"p/q"`, an integer, or a decimal such as `"0.16"` (converted
/// exactly, so `"0.16"` becomes `4/25`).
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = parse_decimal(p.trim()).ok_or_else(|| ParseRationalError::Malformed(s.into()))?;
        let den = parse_decimal(q.trim()).ok_or_else(|| ParseRationalError::Malformed(s.into()))?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.into()));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(|| ParseRationalError::Malformed(s.into()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = Rational::new(num, den);
    Some(if negative { -value } else { value })
}

/// Renders `p/q`, or just `p` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn floor(value: &Rational) -> Rational {
    value.floor()
}

pub fn frac(value: &Rational) -> Rational {
    value - value.floor()
}

pub fn is_integer(value: &Rational) -> bool {
    value.is_integer()
}

/// Integer value of a rational known to be integral and to fit in `i64`.
pub fn to_i64(value: &Rational) -> Option<i64> {
    if !value.is_integer() {
        return None;
    }
    i64::try_from(value.numer().clone()).ok()
}

pub fn min_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

/// Lossy conversion for display and statistics only.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Uniform draw compared against an exact probability: returns `true` with
/// probability `p` up to a bias below 2^-64.
pub fn bernoulli_u64(draw: u64, p: &Rational) -> bool {
    if !p.is_positive() {
        return false;
    }
    if p >= &Rational::one() {
        return true;
    }
    // draw < p * 2^64  <=>  draw * den < num * 2^64
    let lhs = BigInt::from(draw) * p.denom();
    let rhs = p.numer() << 64u32;
    lhs < rhs
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapter storing a [`Rational`] as its exact string form.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }

    pub(crate) struct RationalVisitor;

    impl<'de> Visitor<'de> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a rational literal such as \"3/8\", \"0.16\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
            parse_rational(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
            parse_rational(&v.to_string()).map_err(E::custom)
        }
    }
}

/// Serde adapter for square grids of rationals.
pub mod serde_grid {
    use super::*;
    use serde::de::SeqAccess;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(grid: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut outer = s.serialize_seq(Some(grid.len()))?;
        for row in grid {
            let strings: Vec<String> = row.iter().map(format_rational).collect();
            outer.serialize_element(&strings)?;
        }
        outer.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        struct Row(Vec<Rational>);
        impl<'de> serde::Deserialize<'de> for Row {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct RowVisitor;
                impl<'de> Visitor<'de> for RowVisitor {
                    type Value = Row;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        f.write_str("a row of rational literals")
                    }
                    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Row, A::Error> {
                        let mut out = Vec::new();
                        while let Some(v) = seq.next_element::<Entry>()? {
                            out.push(v.0);
                        }
                        Ok(Row(out))
                    }
                }
                d.deserialize_seq(RowVisitor)
            }
        }
        struct Entry(Rational);
        impl<'de> serde::Deserialize<'de> for Entry {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                serde_str::deserialize(d).map(Entry)
            }
        }
        let rows: Vec<Row> = serde::Deserialize::deserialize(d)?;
        Ok(rows.into_iter().map(|r| r.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/8").unwrap(), ratio(3, 8));
        assert_eq!(parse_rational("6/16").unwrap(), ratio(3, 8));
        assert_eq!(parse_rational("0.16").unwrap(), ratio(4, 25));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational(" .5 ").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("1.5/3").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_rational(""), Err(ParseRationalError::Empty));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!(parse_rational("abc"), Err(ParseRationalError::Malformed(_))));
        assert!(matches!(parse_rational("1e5"), Err(ParseRationalError::Malformed(_))));
        assert!(matches!(parse_rational("."), Err(ParseRationalError::Malformed(_))));
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rational(&ratio(100, 114)), "50/57");
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
    }

    #[test]
    fn bernoulli_extremes() {
        assert!(!bernoulli_u64(0, &int(0)));
        assert!(bernoulli_u64(u64::MAX, &int(1)));
        assert!(bernoulli_u64(0, &ratio(1, 2)));
        assert!(!bernoulli_u64(1u64 << 63, &ratio(1, 2)));
        assert!(bernoulli_u64((1u64 << 63) - 1, &ratio(1, 2)));
    }

    #[test]
    fn frac_and_floor() {
        assert_eq!(frac(&ratio(7, 4)), ratio(3, 4));
        assert_eq!(floor(&ratio(7, 4)), int(1));
        assert_eq!(to_i64(&ratio(6, 3)), Some(2));
        assert_eq!(to_i64(&ratio(1, 3)), None);
    }
}
