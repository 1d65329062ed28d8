//! Exact scalars.
//!
//! Every quantity in the toolkit is a [`Rational`] (an arbitrary precision
//! fraction kept in lowest terms with a positive denominator). The wire
//! format is the string `"p/q"`, or `"p"` when the denominator is one.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `n/d` from machine integers. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Sign as a rational in {-1, 0, 1}; `sgn(0) = 0`.
pub fn sgn(q: &Rational) -> Rational {
    if q.is_zero() {
        zero()
    } else if q.is_positive() {
        one()
    } else {
        -one()
    }
}

/// `q^k` for a non-negative exponent.
pub fn pow(q: &Rational, k: usize) -> Rational {
    num_traits::pow::pow(q.clone(), k)
}

/// `2^-k`.
pub fn inv_pow2(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

pub fn clamp(q: Rational, lo: &Rational, hi: &Rational) -> Rational {
    if &q < lo {
        lo.clone()
    } else if &q > hi {
        hi.clone()
    } else {
        q
    }
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn format(q: &Rational) -> String {
    q.to_string()
}

/// Lossy conversion, used only for human-facing summaries.
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

/// Serde adapter: a [`Rational`] carried as its `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatStr(pub Rational);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RatStr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatStr, E> {
                parse(v).map(RatStr).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatStr, E> {
                Ok(RatStr(Rational::from_integer(BigInt::from(v))))
            }
        }
        d.deserialize_any(V)
    }
}

impl From<Rational> for RatStr {
    fn from(q: Rational) -> Self {
        RatStr(q)
    }
}

pub mod serde_rat {
    //! `#[serde(with = ...)]` helper for plain `Rational` fields.
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        RatStr::deserialize(d).map(|r| r.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("-1/4").unwrap(), rat(-1, 4));
        assert_eq!(parse("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse(" 7 / 3 ").unwrap(), rat(7, 3));
        assert_eq!(format(&rat(-1, 4)), "-1/4");
        assert_eq!(format(&int(2)), "2");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("0.5").is_err());
    }

    #[test]
    fn reduced_form_invariant() {
        let q = rat(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
    }

    #[test]
    fn sign_convention() {
        assert_eq!(sgn(&zero()), zero());
        assert_eq!(sgn(&rat(-3, 7)), -one());
        assert_eq!(sgn(&rat(3, 7)), one());
    }

    #[test]
    fn powers() {
        assert_eq!(pow(&rat(-1, 2), 3), rat(-1, 8));
        assert_eq!(pow(&rat(5, 3), 0), one());
        assert_eq!(inv_pow2(4), rat(1, 16));
    }

    #[test]
    fn wire_round_trip() {
        let s = serde_json::to_string(&RatStr(rat(-7, 3))).unwrap();
        assert_eq!(s, "\"-7/3\"");
        let back: RatStr = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, rat(-7, 3));
        let from_int: RatStr = serde_json::from_str("5").unwrap();
        assert_eq!(from_int.0, int(5));
    }
}
