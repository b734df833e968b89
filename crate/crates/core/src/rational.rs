//! Exact rational arithmetic for chord actions and constraint coefficients.
//!
//! Wraps an arbitrary-precision rational kept in lowest terms with a positive
//! denominator.  Serializes as the string `"p/q"`; a bare integer `"p"` is
//! accepted on input and produced on output when the denominator is 1, so
//! parse ∘ serialize is the identity on values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rational(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_ratio(numer: BigInt, denom: BigInt) -> Self {
        assert!(!num::Zero::is_zero(&denom), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let mut parts = s.splitn(2, '/');
        let numer = parts.next().unwrap();
        let numer: BigInt = numer
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        match parts.next() {
            None => Ok(Rational(BigRational::from_integer(numer))),
            Some(denom) => {
                let denom: BigInt = denom
                    .parse()
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                if denom.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0
            .partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_normalizes() {
        assert_eq!(r("4/6"), Rational::new(2, 3));
        assert_eq!(r("-4/6"), Rational::new(-2, 3));
        assert_eq!(r("4/-6"), Rational::new(-2, 3));
        assert_eq!(r("7"), Rational::integer(7));
        assert_eq!(r("0/5"), Rational::zero());
    }

    #[test]
    fn rejects_bad_literals() {
        assert_eq!("1/0".parse::<Rational>(), Err(ParseRationalError::ZeroDenominator("1/0".into())));
        assert!(matches!(r#"x"#.parse::<Rational>(), Err(ParseRationalError::Malformed(_))));
        assert_eq!("".parse::<Rational>(), Err(ParseRationalError::Empty));
        assert!(matches!("1/2/3".parse::<Rational>(), Err(ParseRationalError::Malformed(_))));
    }

    #[test]
    fn display_round_trips() {
        for s in ["2/3", "-2/3", "5", "0", "-17/4"] {
            assert_eq!(r(s).to_string(), s);
        }
        // non-canonical input prints canonically
        assert_eq!(r("10/4").to_string(), "5/2");
    }

    #[test]
    fn exact_arithmetic() {
        assert_eq!(r("1/3") + r("1/6"), r("1/2"));
        assert_eq!(r("1/3") - r("1/2"), r("-1/6"));
        assert_eq!(r("2/3") * r("9/4"), r("3/2"));
        assert_eq!(r("2/3") / r("4/9"), r("3/2"));
        assert!(r("1/3") < r("2/5"));
        assert_eq!((-r("3/7")).abs(), r("3/7"));
    }
}
