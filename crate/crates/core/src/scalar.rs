//! Coefficient fields.
//!
//! Hopf-algebra identities are checked in exact rational arithmetic; analytic
//! quantities (norms, ODE solutions) use `f64`. Everything generic is written
//! against [`Scalar`] so the same code path runs in both modes.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Signed
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + for<'a> std::ops::AddAssign<&'a Self>
    + for<'a> std::ops::SubAssign<&'a Self>
    + for<'a> std::ops::MulAssign<&'a Self>
{
    /// True when arithmetic is exact, i.e. equality tests are meaningful.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact binary value of `v` for rationals, identity for floats.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn pow_u32(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc *= self;
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.to_string()))
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("not a float: {n}"))),
            Value::String(s) => Ok(rational_to_f64(&parse_rational(s)?)),
            other => Err(Error::Parse(format!("expected number, got {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_json(&self) -> Value {
        if self.is_integer() {
            if let Some(i) = self.numer().to_i64() {
                return Value::from(i);
            }
        }
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(<Self as Scalar>::from_i64(i))
                } else {
                    let f = n
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
                    Ok(<Self as Scalar>::from_f64(f))
                }
            }
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(f) = ToPrimitive::to_f64(r) {
        return f;
    }
    // numerator/denominator too large for direct conversion
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Parses `"a"`, `"a/b"` or a decimal literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(i));
    }
    let f: f64 = s.parse().map_err(|_| Error::Parse(format!("not a rational: {s}")))?;
    <Rational as FromPrimitive>::from_f64(f).ok_or_else(|| Error::Parse(format!("not finite: {s}")))
}

/// `n!` as a scalar.
pub fn factorial<S: Scalar>(n: u32) -> S {
    let mut acc = S::one();
    for k in 2..=n {
        acc *= &S::from_i64(k as i64);
    }
    acc
}

/// Magnitude used for pivoting and tolerance checks.
pub fn magnitude<S: Scalar>(x: &S) -> f64 {
    x.abs().to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_json_round_trip() {
        let r = Rational::from_ratio(-3, 7);
        let v = r.to_json();
        assert_eq!(v, Value::String("-3/7".into()));
        assert_eq!(Rational::from_json(&v).unwrap(), r);
        assert_eq!(<Rational as Scalar>::from_i64(5).to_json(), Value::from(5));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("6/4").unwrap(), Rational::from_ratio(3, 2));
        assert_eq!(parse_rational("0.5").unwrap(), Rational::from_ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial::<Rational>(4), <Rational as Scalar>::from_i64(24));
        assert_eq!(factorial::<f64>(0), 1.0);
    }
}
