//! Exact rational helpers: `p/q` rendering and parsing, small factorials,
//! and the [`Coefficient`] trait used by the generic inversion code.

use std::str::FromStr;

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Renders `p/q` with `q > 0` and `gcd(p, q) = 1`, or `p` for integers.
pub fn format_rational(q: &Rational) -> String {
    // `Ratio` is kept reduced with a positive denominator.
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::domain(format!("not a rational number: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn from_biguint(u: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(u.clone()))
}

pub fn factorial(k: u32) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn factorial_q(k: u32) -> Rational {
    from_biguint(&factorial(k))
}

pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `(-1)^k` as a rational.
pub fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}

/// A vector space over the rationals. Lets the Möbius inversion act on
/// plain numbers as well as on symbolic Feynman weights.
pub trait Coefficient: Clone + PartialEq {
    fn null() -> Self;
    fn add_scaled(&mut self, other: &Self, factor: &Rational);
}

impl Coefficient for Rational {
    fn null() -> Self {
        Zero::zero()
    }

    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        *self += other * factor;
    }
}

pub(crate) mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
