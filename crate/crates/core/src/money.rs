//! Integer-cent money.
//!
//! Amounts are kept as whole cents so that sums over millions of trips do not
//! drift. On the wire they travel as decimal strings with two fraction digits.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cents(pub i64);

impl Cents {
    pub const ZERO: Cents = Cents(0);

    /// Rounds half away from zero.
    pub fn from_dollars(dollars: f64) -> Cents {
        Cents((dollars * 100.0).round() as i64)
    }

    pub fn dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn abs(self) -> Cents {
        Cents(self.0.abs())
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseMoneyError(String);

impl fmt::Display for ParseMoneyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a dollar amount: {:?}", self.0)
    }
}

impl std::error::Error for ParseMoneyError {}

impl FromStr for Cents {
    type Err = ParseMoneyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s.trim().parse().map_err(|_| ParseMoneyError(s.to_string()))?;
        if !v.is_finite() {
            return Err(ParseMoneyError(s.to_string()));
        }
        Ok(Cents::from_dollars(v))
    }
}

impl Add for Cents {
    type Output = Cents;
    fn add(self, rhs: Cents) -> Cents {
        Cents(self.0 + rhs.0)
    }
}

impl Sub for Cents {
    type Output = Cents;
    fn sub(self, rhs: Cents) -> Cents {
        Cents(self.0 - rhs.0)
    }
}

impl Neg for Cents {
    type Output = Cents;
    fn neg(self) -> Cents {
        Cents(-self.0)
    }
}

impl Sum for Cents {
    fn sum<I: Iterator<Item = Cents>>(iter: I) -> Cents {
        Cents(iter.map(|c| c.0).sum())
    }
}

impl Serialize for Cents {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cents {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CentsVisitor;

        impl Visitor<'_> for CentsVisitor {
            type Value = Cents;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a dollar amount as a decimal string or number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cents, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cents, E> {
                Ok(Cents::from_dollars(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cents, E> {
                Ok(Cents(v * 100))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cents, E> {
                Ok(Cents(v as i64 * 100))
            }
        }

        deserializer.deserialize_any(CentsVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_two_fraction_digits() {
        assert_eq!(Cents(830).to_string(), "8.30");
        assert_eq!(Cents(-145).to_string(), "-1.45");
        assert_eq!(Cents(-5).to_string(), "-0.05");
        assert_eq!(Cents(0).to_string(), "0.00");
    }

    #[test]
    fn parses_and_rounds() {
        assert_eq!("12.50".parse::<Cents>().unwrap(), Cents(1250));
        assert_eq!(" 9".parse::<Cents>().unwrap(), Cents(900));
        assert_eq!("-3.2".parse::<Cents>().unwrap(), Cents(-320));
        assert!("twelve".parse::<Cents>().is_err());
        assert!("inf".parse::<Cents>().is_err());
        assert_eq!(Cents::from_dollars(8.3), Cents(830));
    }

    #[test]
    fn serde_uses_decimal_strings() {
        let json = serde_json::to_string(&Cents(1001)).unwrap();
        assert_eq!(json, "\"10.01\"");
        let back: Cents = serde_json::from_str("\"10.01\"").unwrap();
        assert_eq!(back, Cents(1001));
        let num: Cents = serde_json::from_str("7.5").unwrap();
        assert_eq!(num, Cents(750));
    }
}
