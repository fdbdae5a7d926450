//! Exact rational orders.
//!
//! Commensurate orders are kept as reduced integer fractions so that common
//! bases and order ladders never pick up floating-point drift.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A positive rational number `numerator / denominator` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalOrder {
    numerator: u32,
    denominator: u32,
}

impl RationalOrder {
    pub const ONE: RationalOrder = RationalOrder {
        numerator: 1,
        denominator: 1,
    };

    pub fn new(numerator: u32, denominator: u32) -> Result<Self> {
        if numerator == 0 || denominator == 0 {
            return Err(Error::invalid(format!(
                "rational order {numerator}/{denominator} must be positive"
            )));
        }
        let g = gcd_u64(numerator as u64, denominator as u64) as u32;
        Ok(RationalOrder {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    /// `1/k`, the usual commensurate base.
    pub fn reciprocal(k: u32) -> Result<Self> {
        Self::new(1, k)
    }

    pub fn numerator(&self) -> u32 {
        self.numerator
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Largest rational dividing both `self` and `other` an integer number of times.
    pub fn gcd(&self, other: &RationalOrder) -> RationalOrder {
        let a = self.numerator as u64 * other.denominator as u64;
        let b = other.numerator as u64 * self.denominator as u64;
        let n = gcd_u64(a, b);
        let d = self.denominator as u64 * other.denominator as u64;
        let g = gcd_u64(n, d);
        RationalOrder {
            numerator: (n / g) as u32,
            denominator: (d / g) as u32,
        }
    }

    /// `self / base` when that quotient is an integer.
    pub fn multiple_of(&self, base: &RationalOrder) -> Option<u32> {
        let num = self.numerator as u64 * base.denominator as u64;
        let den = self.denominator as u64 * base.numerator as u64;
        (num % den == 0).then(|| (num / den) as u32)
    }

    /// `floor(self / base)`.
    pub fn floor_div(&self, base: &RationalOrder) -> u32 {
        let num = self.numerator as u64 * base.denominator as u64;
        let den = self.denominator as u64 * base.numerator as u64;
        (num / den) as u32
    }

    pub fn is_integer(&self) -> bool {
        self.denominator == 1
    }
}

impl fmt::Display for RationalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for RationalOrder {
    type Err = Error;

    /// Accepts `"n/d"` or a bare positive integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |part: &str| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("cannot parse rational order {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => RationalOrder::new(parse(n)?, parse(d)?),
            None => RationalOrder::new(parse(s)?, 1),
        }
    }
}

impl Serialize for RationalOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalOrder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
