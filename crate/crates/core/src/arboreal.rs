//! Discriminant classes of iterates, killed sign characters and finite-level
//! index certificates for arboreal representations over multiquadratic fields.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactpoly::{discriminant, factor_degrees_of_iterate, FactorDegreePattern, PolyError, RatPoly};
use crate::factor::next_prime_u64;
use crate::sqclass::{class_of, ClassError, ClassSubspace, DiscClasses, SquareClass};
use crate::treegroup::group_order;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArborError {
    #[error("iterate {0} is inseparable (discriminant zero)")]
    Inseparable(usize),
    #[error("no good primes within a budget of {0}")]
    NoGoodPrimes(usize),
    #[error("level must be at least 1")]
    LevelZero,
    #[error("start level {start} exceeds depth {depth}")]
    StartAfterDepth { start: usize, depth: usize },
    #[error(transparent)]
    Class(ClassError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl From<ClassError> for ArborError {
    fn from(e: ClassError) -> Self {
        match e {
            ClassError::Inseparable(n) => ArborError::Inseparable(n),
            ClassError::Poly(p) => ArborError::Poly(p),
            other => ArborError::Class(other),
        }
    }
}

/// Classes of `disc(f^n)` for `1 ≤ n ≤ computed_to`.
#[derive(Clone, Debug)]
pub struct DiscClassSequence {
    engine: DiscClasses,
    classes: Vec<SquareClass>,
}

impl DiscClassSequence {
    pub fn poly(&self) -> &RatPoly {
        self.engine.poly()
    }

    pub fn classes(&self) -> &[SquareClass] {
        &self.classes
    }

    pub fn computed_to(&self) -> usize {
        self.classes.len()
    }

    /// Extends the stored prefix to depth `n`.
    pub fn extend_to(&mut self, n: usize) -> Result<(), ArborError> {
        while self.classes.len() < n {
            let c = self.engine.class(self.classes.len() + 1)?;
            self.classes.push(c);
        }
        Ok(())
    }

    /// Recomputes entry `n` from the expanded iterate, bypassing the cache.
    pub fn recompute(&self, n: usize) -> Result<SquareClass, ArborError> {
        let disc = discriminant(&self.poly().iterate(n)?)?;
        if num_traits::Zero::is_zero(&disc) {
            return Err(ArborError::Inseparable(n));
        }
        Ok(class_of(&disc)?)
    }
}

pub fn disc_class_sequence(f: &RatPoly, depth: usize) -> Result<DiscClassSequence, ArborError> {
    if f.degree().unwrap_or(0) < 2 {
        return Err(PolyError::DegreeTooSmall { needed: 2, got: f.signed_degree().to_string() }.into());
    }
    let mut seq = DiscClassSequence { engine: DiscClasses::new(f)?, classes: Vec::new() };
    seq.extend_to(depth)?;
    Ok(seq)
}

/// Span of the classes at levels `start..=depth`, joined to `base`.
pub fn discriminant_subextension(
    f: &RatPoly,
    base: &ClassSubspace,
    start: usize,
    depth: usize,
) -> Result<ClassSubspace, ArborError> {
    if start == 0 {
        return Err(ArborError::LevelZero);
    }
    if depth < start {
        return Err(ArborError::StartAfterDepth { start, depth });
    }
    let seq = disc_class_sequence(f, depth)?;
    Ok(base.compositum(&ClassSubspace::span(&seq.classes()[start - 1..])))
}

/// Levels `n ≤ k` whose discriminant class already lies in `span`.
pub fn killed_signs(f: &RatPoly, span: &ClassSubspace, k: usize) -> Result<BTreeSet<usize>, ArborError> {
    if k == 0 {
        return Err(ArborError::LevelZero);
    }
    let seq = disc_class_sequence(f, k)?;
    Ok(killed_in(&seq, span, k))
}

pub(crate) fn killed_in(seq: &DiscClassSequence, span: &ClassSubspace, k: usize) -> BTreeSet<usize> {
    seq.classes()[..k].iter().enumerate().filter(|(_, c)| span.member(c)).map(|(i, _)| i + 1).collect()
}

/// Good primes in increasing order with their Frobenius cycle types on level k.
pub fn frobenius_patterns(f: &RatPoly, k: usize, prime_budget: usize) -> Result<Vec<FactorDegreePattern>, ArborError> {
    if k == 0 {
        return Err(ArborError::LevelZero);
    }
    disc_class_sequence(f, k)?;
    const CHUNK: usize = 32;
    let mut out = Vec::with_capacity(prime_budget);
    let mut p = 1u64;
    while out.len() < prime_budget {
        let chunk: Vec<u64> = (0..CHUNK)
            .map(|_| {
                p = next_prime_u64(p);
                p
            })
            .collect();
        let results: Vec<Option<FactorDegreePattern>> =
            chunk.par_iter().map(|&q| factor_degrees_of_iterate(f, k, q).ok()).collect();
        out.extend(results.into_iter().flatten().take(prime_budget - out.len()));
    }
    Ok(out)
}

/// lcm of Frobenius orders over the first `prime_budget` good primes; a
/// divisor of the degree of the splitting field of `f^k`.
pub fn splitting_degree_lower_bound(f: &RatPoly, k: usize, prime_budget: usize) -> Result<BigUint, ArborError> {
    if prime_budget == 0 {
        disc_class_sequence(f, k.max(1))?;
        return Err(ArborError::NoGoodPrimes(0));
    }
    let patterns = frobenius_patterns(f, k, prime_budget)?;
    Ok(patterns.iter().fold(BigUint::one(), |acc, pat| num_integer::lcm(acc, BigUint::from(pat.lcm()))))
}

/// Exponent of Aut T_k(d), which is `lcm(1, …, d)^k`; no lcm of element
/// orders can exceed it.
pub fn group_exponent(d: usize, k: usize) -> BigUint {
    let l = (1..=d as u64).fold(1u64, num_integer::lcm);
    num_traits::pow(BigUint::from(l), k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    RefutesIndexAtMost(u64),
    Consistent,
    Unknown,
    Inseparable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::RefutesIndexAtMost(n) => write!(f, "REFUTES_INDEX_AT_MOST({n})"),
            Verdict::Consistent => f.write_str("CONSISTENT"),
            Verdict::Unknown => f.write_str("UNKNOWN"),
            Verdict::Inseparable => f.write_str("INSEPARABLE"),
        }
    }
}

impl FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CONSISTENT" => Ok(Verdict::Consistent),
            "UNKNOWN" => Ok(Verdict::Unknown),
            "INSEPARABLE" => Ok(Verdict::Inseparable),
            _ => s
                .strip_prefix("REFUTES_INDEX_AT_MOST(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse().ok())
                .map(Verdict::RefutesIndexAtMost)
                .ok_or_else(|| format!("unknown verdict {s:?}")),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn biguint_json<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    crate::bigjson::serialize(&n.clone().into(), s)
}

fn biguint_from_json<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
    let n = crate::bigjson::deserialize(d)?;
    n.to_biguint().ok_or_else(|| serde::de::Error::custom("expected a nonnegative integer"))
}

/// One-sided evidence about the index of the level-k image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCertificate {
    pub poly: RatPoly,
    pub base: ClassSubspace,
    pub level: usize,
    pub killed: Vec<usize>,
    #[serde(serialize_with = "biguint_json", deserialize_with = "biguint_from_json")]
    pub index_lower_bound: BigUint,
    #[serde(serialize_with = "biguint_json", deserialize_with = "biguint_from_json")]
    pub degree_lower_bound: BigUint,
    #[serde(serialize_with = "biguint_json", deserialize_with = "biguint_from_json")]
    pub group_order: BigUint,
    /// Largest value any lcm of Frobenius orders can reach on this level.
    #[serde(serialize_with = "biguint_json", deserialize_with = "biguint_from_json")]
    pub degree_evidence_cap: BigUint,
    pub primes_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inseparable_at: Option<usize>,
    pub verdict: Verdict,
}

/// Certificate for "index of the level-k image over `base` is at most `n`".
///
/// Refutation uses killed signs. The consistent verdict needs the degree
/// over the base field, which is at least `degree_lower_bound / 2^dim(base)`.
pub fn index_report(
    f: &RatPoly,
    base: &ClassSubspace,
    k: usize,
    n: u64,
    prime_budget: usize,
) -> Result<IndexCertificate, ArborError> {
    if k == 0 {
        return Err(ArborError::LevelZero);
    }
    let d = f.degree().unwrap_or(0);
    if d < 2 {
        return Err(PolyError::DegreeTooSmall { needed: 2, got: f.signed_degree().to_string() }.into());
    }
    let order = group_order(d, k);
    let mut cert = IndexCertificate {
        poly: f.clone(),
        base: base.clone(),
        level: k,
        killed: Vec::new(),
        index_lower_bound: BigUint::one(),
        degree_lower_bound: BigUint::one(),
        group_order: order.clone(),
        degree_evidence_cap: group_exponent(d, k).min(order.clone()),
        primes_used: 0,
        inseparable_at: None,
        verdict: Verdict::Inseparable,
    };
    let seq = match disc_class_sequence(f, k) {
        Ok(seq) => seq,
        Err(ArborError::Inseparable(level)) => {
            cert.inseparable_at = Some(level);
            return Ok(cert);
        }
        Err(e) => return Err(e),
    };
    cert.killed = killed_in(&seq, base, k).into_iter().collect();
    cert.index_lower_bound = BigUint::one() << cert.killed.len();
    if prime_budget > 0 {
        cert.degree_lower_bound = splitting_degree_lower_bound(f, k, prime_budget)?;
        cert.primes_used = prime_budget;
    }
    let n_big = BigUint::from(n);
    cert.verdict = if cert.index_lower_bound > n_big {
        Verdict::RefutesIndexAtMost(n)
    } else if &cert.degree_lower_bound * &n_big >= (&order << base.dim()) {
        Verdict::Consistent
    } else {
        Verdict::Unknown
    };
    Ok(cert)
}

impl IndexCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}
