//! Scalar kinds supported by the group arithmetic.
//!
//! Two kinds are provided: `f64` for fast numerical work and
//! [`Rational`] (arbitrary-precision `BigInt` fractions) for exact checks.

use std::fmt::Debug;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

/// A field element usable as a coordinate.
pub trait Scalar: Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// Default membership guard: `eta(x) > guard` is required for membership.
    fn default_guard() -> Self;

    fn to_f64(&self) -> f64;

    fn is_finite_value(&self) -> bool;

    /// Zero test. Exact for rationals; `|x| <= tol` for floats.
    fn near_zero(&self, tol: f64) -> bool;

    /// Parse a decimal (`"1.5"`) or, for rationals, a fraction (`"3/4"`).
    fn parse_scalar(s: &str) -> Result<Self>;

    fn to_json(&self) -> Value;
}

impl Scalar for f64 {
    fn default_guard() -> Self {
        1e-12
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn near_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| bad_scalar(s))?;
            let q: f64 = q.trim().parse().map_err(|_| bad_scalar(s))?;
            return Ok(p / q);
        }
        s.parse().map_err(|_| bad_scalar(s))
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

impl Scalar for Rational {
    fn default_guard() -> Self {
        Rational::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad_scalar(s))?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad_scalar(s))?;
            if q.is_zero() {
                return Err(bad_scalar(s));
            }
            return Ok(Rational::new(p, q));
        }
        parse_decimal(s).ok_or_else(|| bad_scalar(s))
    }

    fn to_json(&self) -> Value {
        if self.denom() == &BigInt::from(1) {
            Value::String(self.numer().to_string())
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
}

/// Exact decimal parse: "-12.375" -> -12375/1000.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let denom = num::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

fn bad_scalar(s: &str) -> Error {
    Error::InvalidInput(format!("cannot parse scalar {s:?}"))
}

/// Exact rational from a small integer fraction.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse a comma-separated list of scalars.
pub fn parse_list<S: Scalar>(s: &str) -> Result<Vec<S>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(S::parse_scalar)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(Rational::parse_scalar("3/4").unwrap(), ratio(3, 4));
        assert_eq!(Rational::parse_scalar("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(Rational::parse_scalar("7").unwrap(), ratio(7, 1));
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("abc").is_err());
        assert!(Rational::parse_scalar(".").is_err());
    }

    #[test]
    fn float_parsing_accepts_fractions() {
        assert_eq!(f64::parse_scalar("1/4").unwrap(), 0.25);
        assert_eq!(parse_list::<f64>("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rational_json_is_string() {
        assert_eq!(ratio(-3, 5).to_json(), Value::String("-3/5".into()));
        assert_eq!(ratio(4, 2).to_json(), Value::String("2".into()));
    }
}
