use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element of ℤ₂ written multiplicatively as `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Z2 {
    Plus,
    Minus,
}

impl Z2 {
    /// `Plus` for non-negative `x`.
    pub fn from_sign(x: f64) -> Z2 {
        if x >= 0.0 {
            Z2::Plus
        } else {
            Z2::Minus
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Z2::Plus => 1,
            Z2::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Z2> {
        match v {
            1 => Some(Z2::Plus),
            -1 => Some(Z2::Minus),
            _ => None,
        }
    }
}

impl Mul for Z2 {
    type Output = Z2;
    fn mul(self, rhs: Z2) -> Z2 {
        if self == rhs {
            Z2::Plus
        } else {
            Z2::Minus
        }
    }
}

impl std::iter::Product for Z2 {
    fn product<I: Iterator<Item = Z2>>(iter: I) -> Z2 {
        iter.fold(Z2::Plus, |a, b| a * b)
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Z2::Plus => write!(f, "+1"),
            Z2::Minus => write!(f, "-1"),
        }
    }
}

impl Serialize for Z2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Z2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Z2::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("expected ±1, got {v}")))
    }
}
