//! Supernatural numbers: formal products of prime powers whose exponents may
//! be infinite. Degrees of infinite algebraic extensions and orders of
//! profinite groups live here.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::factor::{self, FactorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupernatError {
    #[error("supernatural numbers are built from positive integers, got {0}")]
    NonPositive(BigInt),
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("malformed supernatural number {0:?}")]
    Parse(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Exponent of a prime in a supernatural number. `Infinite` absorbs under addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

impl Exponent {
    fn add(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a + b),
            _ => Exponent::Infinite,
        }
    }

    fn le(self, other: Exponent) -> bool {
        match (self, other) {
            (_, Exponent::Infinite) => true,
            (Exponent::Infinite, Exponent::Finite(_)) => false,
            (Exponent::Finite(a), Exponent::Finite(b)) => a <= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupernaturalNumber {
    // keys are primes; zero exponents are never stored
    exponents: BTreeMap<BigUint, Exponent>,
}

impl SupernaturalNumber {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: BigUint, e: Exponent) -> Result<Self, SupernatError> {
        if !factor::is_probable_prime(&p) {
            return Err(SupernatError::NotPrime(p));
        }
        let mut exponents = BTreeMap::new();
        if e != Exponent::Finite(0) {
            exponents.insert(p, e);
        }
        Ok(Self { exponents })
    }

    /// `p^∞` for a prime `p`.
    pub fn prime_infinite(p: u64) -> Result<Self, SupernatError> {
        Self::prime_power(BigUint::from(p), Exponent::Infinite)
    }

    pub fn from_integer(n: &BigInt) -> Result<Self, SupernatError> {
        if !n.is_positive() {
            return Err(SupernatError::NonPositive(n.clone()));
        }
        let exponents =
            factor::factorize(n.magnitude())?.into_iter().map(|(p, e)| (p, Exponent::Finite(e as u64))).collect();
        Ok(Self { exponents })
    }

    pub fn from_u64(n: u64) -> Result<Self, SupernatError> {
        Self::from_integer(&BigInt::from(n))
    }

    pub fn exponent(&self, p: &BigUint) -> Exponent {
        self.exponents.get(p).copied().unwrap_or(Exponent::Finite(0))
    }

    pub fn factors(&self) -> impl Iterator<Item = (&BigUint, Exponent)> {
        self.exponents.iter().map(|(p, e)| (p, *e))
    }

    pub fn is_finite(&self) -> bool {
        self.exponents.values().all(|e| *e != Exponent::Infinite)
    }

    /// The ordinary integer, when every exponent is finite.
    pub fn to_integer(&self) -> Option<BigUint> {
        let mut acc = BigUint::one();
        for (p, e) in &self.exponents {
            match e {
                Exponent::Finite(k) => acc *= p.pow(*k as u32),
                Exponent::Infinite => return None,
            }
        }
        Some(acc)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (p, e) in &other.exponents {
            exponents.entry(p.clone()).and_modify(|x| *x = x.add(*e)).or_insert(*e);
        }
        Self { exponents }
    }

    /// `self | other`: every exponent of `self` is at most the matching one of `other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.exponents.iter().all(|(p, e)| e.le(other.exponent(p)))
    }
}

impl Mul for &SupernaturalNumber {
    type Output = SupernaturalNumber;
    fn mul(self, rhs: Self) -> SupernaturalNumber {
        SupernaturalNumber::mul(self, rhs)
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            match e {
                Exponent::Finite(1) => write!(f, "{p}")?,
                Exponent::Finite(k) => write!(f, "{p}^{k}")?,
                Exponent::Infinite => write!(f, "{p}^inf")?,
            }
        }
        Ok(())
    }
}

impl FromStr for SupernaturalNumber {
    type Err = SupernatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SupernatError::Parse(s.to_string());
        let trimmed = s.trim();
        if trimmed == "1" {
            return Ok(Self::one());
        }
        let mut acc = Self::one();
        for factor in trimmed.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (factor, "1"),
            };
            let p: BigUint = base.parse().map_err(|_| bad())?;
            let e = match exp {
                "inf" | "∞" => Exponent::Infinite,
                k => Exponent::Finite(k.parse().map_err(|_| bad())?),
            };
            acc = acc.mul(&Self::prime_power(p, e)?);
        }
        Ok(acc)
    }
}

impl Serialize for SupernaturalNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SupernaturalNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
