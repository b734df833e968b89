//! Signs of Reeb chords and crossings, closed under multiplication.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A sign in `{+1, -1}`.  Serializes as the integer `1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn parity(k: u32) -> Sign {
        if k % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.as_i64())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom("sign must be 1 or -1"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_table() {
        use Sign::*;
        assert_eq!(Plus * Plus, Plus);
        assert_eq!(Plus * Minus, Minus);
        assert_eq!(Minus * Plus, Minus);
        assert_eq!(Minus * Minus, Plus);
    }

    #[test]
    fn parity() {
        assert_eq!(Sign::parity(0), Sign::Plus);
        assert_eq!(Sign::parity(1), Sign::Minus);
        assert_eq!(Sign::parity(4), Sign::Plus);
        assert_eq!(Sign::parity(7), Sign::Minus);
    }

    #[test]
    fn serde_as_integer() {
        assert_eq!(serde_json::to_string(&Sign::Minus).unwrap(), "-1");
        assert_eq!(serde_json::from_str::<Sign>("1").unwrap(), Sign::Plus);
        assert!(serde_json::from_str::<Sign>("2").is_err());
    }
}
