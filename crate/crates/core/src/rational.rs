//! Exact rational numbers for costs, weights, and dual values.
//!
//! Values travel through files as strings: either a decimal integer (`"3"`)
//! or a fraction (`"3/2"`).

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn parse(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let valid = trimmed
        .chars()
        .all(|c| c.is_ascii_digit() || c == '/' || c == '-' || c == '+');
    if !valid {
        return Err(Error::Parse(format!(
            "`{trimmed}` is not a decimal integer or num/den fraction"
        )));
    }
    if let Some((_, den)) = trimmed.split_once('/') {
        if BigInt::from_str(den).map(|d| d.is_zero()).unwrap_or(false) {
            return Err(Error::Parse(format!("`{trimmed}` has a zero denominator")));
        }
    }
    Rational::from_str(trimmed).map_err(|_| Error::Parse(format!("`{trimmed}` is not a rational")))
}

pub fn parse_nonnegative(text: &str) -> Result<Rational> {
    let value = parse(text)?;
    if value.is_negative() {
        return Err(Error::Parse(format!("`{text}` must be nonnegative")));
    }
    Ok(value)
}

pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// Common denominator of `values`, so that every value times it is an integer.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scale every value by `scale` and convert the (integral) result to `i128`.
/// Returns `None` when a result does not fit below `bound`.
pub fn scaled_integers(values: &[Rational], scale: &BigInt, bound: i128) -> Option<Vec<i128>> {
    values
        .iter()
        .map(|v| {
            let scaled = v * Rational::from_integer(scale.clone());
            debug_assert!(is_integer(&scaled));
            let n = scaled.to_integer().to_i128()?;
            (n.abs() <= bound).then_some(n)
        })
        .collect()
}

pub fn from_scaled(value: i128, scale: &BigInt) -> Rational {
    Rational::new(BigInt::from(value), scale.clone())
}

/// Serde adapter that stores a [`Rational`] as a string.
pub mod as_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = super::RationalText::deserialize(d)?;
        text.into_rational().map_err(serde::de::Error::custom)
    }
}

/// Accepts either a JSON string or a bare JSON integer.
#[derive(serde::Deserialize)]
#[serde(untagged)]
pub(crate) enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    pub(crate) fn into_rational(self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => parse(&s),
            RationalText::Int(n) => Ok(int(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse(" 0 ").unwrap(), int(0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("1.5").is_err());
        assert!(parse("").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse_nonnegative("-2").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format(&ratio(4, 2)), "2");
        assert_eq!(format(&ratio(1, 3)), "1/3");
    }

    #[test]
    fn scaling_round_trips() {
        let values = vec![ratio(1, 2), ratio(2, 3), int(4)];
        let scale = common_denominator(&values);
        assert_eq!(scale, BigInt::from(6));
        let ints = scaled_integers(&values, &scale, i128::MAX).unwrap();
        assert_eq!(ints, vec![3, 4, 24]);
        assert_eq!(from_scaled(ints[0], &scale), ratio(1, 2));
        assert!(scaled_integers(&values, &scale, 10).is_none());
    }
}
