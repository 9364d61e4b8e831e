//! Rational square classes and their F₂-spans.
//!
//! A class is stored as its support: the sorted set of coordinates, where
//! `-1` stands for the sign and every other coordinate is a prime. Sorting
//! the coordinates as integers puts `-1` first, which is the pivot order
//! used by the echelon forms below.

mod stream;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactpoly::{PolyError, RatPoly};
use crate::factor::{self, FactorError, PartialFactorization};

pub use stream::{ClassStream, DiscClasses, StreamSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("square class of zero is undefined")]
    Zero,
    #[error("{0} is not a squarefree integer")]
    NotSquarefree(BigInt),
    #[error("base subspace is not contained in both arguments")]
    BaseNotContained,
    #[error("all {depth} inspected classes lie in the subspace")]
    DepthExhausted { depth: usize },
    #[error("iterate {0} is inseparable (discriminant zero)")]
    Inseparable(usize),
    #[error("unknown stream specification {0:?}")]
    UnknownStream(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Rho iterations spent per integer when computing a class.
pub const CLASS_RHO_BUDGET: u64 = 1 << 18;

/// Element of ℚ*/ℚ*², stored as the set of coordinates with odd exponent.
///
/// Coordinates are `-1`, primes, and rough coordinates: composite cofactors
/// that resisted splitting. A rough coordinate is never a perfect square,
/// and operations refine coordinates by gcds until everything in play is
/// pairwise coprime, so the coordinates stay independent mod squares. The
/// kernel is the product of the coordinates; it is the squarefree kernel
/// whenever no rough coordinate is present.
#[derive(Clone, Debug)]
pub struct SquareClass {
    support: Vec<BigInt>,
    rough: Vec<BigInt>,
}

fn minus_one() -> BigInt {
    BigInt::from(-1)
}

fn odd_part(map: &BTreeMap<BigUint, u32>) -> impl Iterator<Item = BigInt> + '_ {
    map.iter().filter(|(_, &e)| e % 2 == 1).map(|(p, _)| BigInt::from(p.clone()))
}

impl SquareClass {
    pub fn trivial() -> Self {
        Self { support: Vec::new(), rough: Vec::new() }
    }

    fn from_parts(mut support: Vec<BigInt>, mut rough: Vec<BigInt>) -> Self {
        support.sort();
        rough.sort();
        Self { support, rough }
    }

    /// The class of a prime or of `-1`; no primality check.
    pub(crate) fn coordinate(c: BigInt) -> Self {
        Self { support: vec![c], rough: Vec::new() }
    }

    /// Class from a factorization `sign · ∏ p^e`.
    pub fn from_factorization(negative: bool, factors: &BTreeMap<BigUint, u32>) -> Self {
        let mut support: Vec<BigInt> = odd_part(factors).collect();
        if negative {
            support.push(minus_one());
        }
        Self::from_parts(support, Vec::new())
    }

    fn from_partial(negative: bool, parts: &[PartialFactorization]) -> Self {
        let mut support = Vec::new();
        let mut rough = Vec::new();
        for pf in parts {
            support.extend(odd_part(&pf.primes));
            rough.extend(odd_part(&pf.unsplit));
        }
        support.extend(rough.iter().cloned());
        if negative {
            support.push(minus_one());
        }
        Self::from_parts(support, rough)
    }

    /// Class of a nonzero rational.
    pub fn of_rational(q: &BigRational) -> Result<Self, ClassError> {
        if q.is_zero() {
            return Err(ClassError::Zero);
        }
        let num = factor::factorize_partial(q.numer().magnitude(), CLASS_RHO_BUDGET)?;
        let den = factor::factorize_partial(q.denom().magnitude(), CLASS_RHO_BUDGET)?;
        Ok(Self::from_partial(q.is_negative(), &[num, den]))
    }

    pub fn of_integer(n: &BigInt) -> Result<Self, ClassError> {
        Self::of_rational(&BigRational::from_integer(n.clone()))
    }

    #[cfg(test)]
    fn of_integer_with_budget(n: &BigInt, budget: u64) -> Self {
        let pf = factor::factorize_partial(n.magnitude(), budget).unwrap();
        Self::from_partial(n.is_negative(), &[pf])
    }

    /// Class whose kernel is exactly `k`; rejects input with a known square factor.
    pub fn from_kernel(k: &BigInt) -> Result<Self, ClassError> {
        if k.is_zero() {
            return Err(ClassError::Zero);
        }
        let pf = factor::factorize_partial(k.magnitude(), CLASS_RHO_BUDGET)?;
        if pf.primes.values().chain(pf.unsplit.values()).any(|&e| e > 1) {
            return Err(ClassError::NotSquarefree(k.clone()));
        }
        Ok(Self::from_partial(k.is_negative(), &[pf]))
    }

    pub fn kernel(&self) -> BigInt {
        self.support.iter().fold(BigInt::one(), |acc, c| acc * c)
    }

    pub fn support(&self) -> &[BigInt] {
        &self.support
    }

    /// Coordinates not known to be prime.
    pub fn rough(&self) -> &[BigInt] {
        &self.rough
    }

    pub fn is_trivial(&self) -> bool {
        self.support.is_empty()
    }

    pub(crate) fn pivot(&self) -> Option<&BigInt> {
        self.support.first()
    }

    pub(crate) fn contains(&self, coord: &BigInt) -> bool {
        self.support.binary_search(coord).is_ok()
    }

    /// Symmetric difference; both sides must already share a coprime base.
    fn mul_raw(&self, other: &Self) -> Self {
        let a: BTreeSet<&BigInt> = self.support.iter().collect();
        let b: BTreeSet<&BigInt> = other.support.iter().collect();
        let support: Vec<BigInt> = a.symmetric_difference(&b).map(|&c| c.clone()).collect();
        let rough = if self.rough.is_empty() && other.rough.is_empty() {
            Vec::new()
        } else {
            support.iter().filter(|c| self.rough.contains(c) || other.rough.contains(c)).cloned().collect()
        };
        Self { support, rough }
    }

    /// Group law.
    pub fn mul(&self, other: &Self) -> Self {
        if self.rough.is_empty() && other.rough.is_empty() {
            return self.mul_raw(other);
        }
        let mut both = [self.clone(), other.clone()];
        harmonize(&mut both);
        both[0].mul_raw(&both[1])
    }
}

impl PartialEq for SquareClass {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support
            || (!(self.rough.is_empty() && other.rough.is_empty()) && self.mul(other).is_trivial())
    }
}

impl Eq for SquareClass {}

fn is_square_coord(c: &BigInt) -> bool {
    factor::is_perfect_square(c.magnitude()).is_some()
}

/// Splits rough coordinates by gcds until every rough coordinate in
/// `classes` is coprime to every other coordinate.
fn harmonize(classes: &mut [SquareClass]) {
    if classes.iter().all(|c| c.rough.is_empty()) {
        return;
    }
    let mut rough: BTreeSet<BigInt> = classes.iter().flat_map(|c| c.rough.iter().cloned()).collect();
    loop {
        let coords: BTreeSet<BigInt> = classes.iter().flat_map(|c| c.support.iter().cloned()).collect();
        let mut hit = None;
        'scan: for r in coords.iter().filter(|c| rough.contains(*c)) {
            for x in coords.iter().filter(|x| x.is_positive() && *x != r) {
                let g = r.gcd(x);
                if !g.is_one() {
                    hit = Some((r.clone(), x.clone(), g));
                    break 'scan;
                }
            }
        }
        let Some((r, x, g)) = hit else {
            break;
        };
        let mut splits = vec![(r.clone(), [g.clone(), &r / &g])];
        if rough.contains(&x) {
            splits.push((x.clone(), [g.clone(), &x / &g]));
        }
        for (coord, pieces) in splits {
            rough.remove(&coord);
            let pieces: Vec<&BigInt> = pieces.iter().filter(|p| !p.is_one() && !is_square_coord(p)).collect();
            for p in &pieces {
                if !factor::is_probable_prime(p.magnitude()) {
                    rough.insert((*p).clone());
                }
            }
            for c in classes.iter_mut().filter(|c| c.contains(&coord)) {
                let mut set: BTreeSet<BigInt> = c.support.iter().cloned().collect();
                set.remove(&coord);
                for p in &pieces {
                    if !set.remove(*p) {
                        set.insert((*p).clone());
                    }
                }
                c.support = set.into_iter().collect();
            }
        }
        for c in classes.iter_mut() {
            c.rough = c.support.iter().filter(|x| rough.contains(*x)).cloned().collect();
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kernel())
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::bigjson::serialize(&self.kernel(), s)
    }
}

impl<'de> Deserialize<'de> for SquareClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let k = crate::bigjson::deserialize(d)?;
        Self::from_kernel(&k).map_err(serde::de::Error::custom)
    }
}

/// Class of a nonzero rational.
pub fn class_of(q: &BigRational) -> Result<SquareClass, ClassError> {
    SquareClass::of_rational(q)
}

/// Eliminates pivots of `rows` from `c`, smallest coordinate first.
fn reduce_against(rows: &BTreeMap<BigInt, SquareClass>, c: &SquareClass) -> SquareClass {
    let mut c = c.clone();
    loop {
        let Some(hit) = c.support.iter().find_map(|x| rows.get(x)) else {
            return c;
        };
        c = c.mul_raw(hit);
    }
}

/// F₂-span of finitely many square classes, in reduced echelon form.
#[derive(Clone, Debug, Default)]
pub struct ClassSubspace {
    rows: BTreeMap<BigInt, SquareClass>,
}

impl ClassSubspace {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn span<'a>(classes: impl IntoIterator<Item = &'a SquareClass>) -> Self {
        let mut v = Self::empty();
        for c in classes {
            v.insert(c);
        }
        v
    }

    pub fn from_kernels(kernels: &[i64]) -> Result<Self, ClassError> {
        let classes: Vec<SquareClass> =
            kernels.iter().map(|&k| SquareClass::of_integer(&BigInt::from(k))).collect::<Result<_, _>>()?;
        Ok(Self::span(&classes))
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> impl Iterator<Item = &SquareClass> {
        self.rows.values()
    }

    /// Sorted kernels of the echelon basis.
    pub fn kernels(&self) -> Vec<BigInt> {
        let mut ks: Vec<BigInt> = self.rows.values().map(SquareClass::kernel).collect();
        ks.sort();
        ks
    }

    fn is_rough(&self) -> bool {
        self.rows.values().any(|r| !r.rough.is_empty())
    }

    /// The rows and `extra` over a common coprime base, when any of them is rough.
    fn aligned(&self, extra: &[&SquareClass]) -> Option<(Self, Vec<SquareClass>)> {
        if !self.is_rough() && extra.iter().all(|c| c.rough.is_empty()) {
            return None;
        }
        let mut all: Vec<SquareClass> = self.rows.values().cloned().chain(extra.iter().map(|&c| c.clone())).collect();
        harmonize(&mut all);
        let xs = all.split_off(self.rows.len());
        let mut v = Self::empty();
        for r in &all {
            v.insert_raw(r);
        }
        Some((v, xs))
    }

    pub fn reduce(&self, c: &SquareClass) -> SquareClass {
        match self.aligned(&[c]) {
            Some((v, xs)) => reduce_against(&v.rows, &xs[0]),
            None => reduce_against(&self.rows, c),
        }
    }

    pub fn member(&self, c: &SquareClass) -> bool {
        self.reduce(c).is_trivial()
    }

    fn insert_raw(&mut self, c: &SquareClass) -> bool {
        let r = reduce_against(&self.rows, c);
        let Some(p) = r.pivot().cloned() else {
            return false;
        };
        for row in self.rows.values_mut() {
            if row.contains(&p) {
                *row = row.mul_raw(&r);
            }
        }
        self.rows.insert(p, r);
        true
    }

    /// Adds `c` in place; returns whether the dimension grew.
    pub fn insert(&mut self, c: &SquareClass) -> bool {
        match self.aligned(&[c]) {
            Some((v, xs)) => {
                *self = v;
                self.insert_raw(&xs[0])
            }
            None => self.insert_raw(c),
        }
    }

    pub fn extend(&self, c: &SquareClass) -> Self {
        let mut v = self.clone();
        v.insert(c);
        v
    }

    pub fn compositum(&self, other: &Self) -> Self {
        let mut v = self.clone();
        for c in other.basis() {
            v.insert(c);
        }
        v
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis().all(|c| self.member(c))
    }

    /// Zassenhaus: eliminate on the first half of `(v, v)` and `(w, 1)`;
    /// rows whose first half vanishes carry the intersection.
    pub fn intersection(&self, other: &Self) -> Self {
        let (a, b): (Vec<SquareClass>, Vec<SquareClass>) = if self.is_rough() || other.is_rough() {
            let mut all: Vec<SquareClass> = self.basis().chain(other.basis()).cloned().collect();
            harmonize(&mut all);
            let b = all.split_off(self.dim());
            (all, b)
        } else {
            (self.basis().cloned().collect(), other.basis().cloned().collect())
        };
        let mut pivots: BTreeMap<BigInt, (SquareClass, SquareClass)> = BTreeMap::new();
        let mut out = Self::empty();
        let rows =
            a.iter().map(|v| (v.clone(), v.clone())).chain(b.iter().map(|w| (w.clone(), SquareClass::trivial())));
        for (mut x, mut y) in rows {
            loop {
                let Some(p) = x.pivot().cloned() else {
                    out.insert_raw(&y);
                    break;
                };
                match pivots.get(&p) {
                    Some((px, py)) => {
                        x = x.mul_raw(px);
                        y = y.mul_raw(py);
                    }
                    None => {
                        pivots.insert(p, (x, y));
                        break;
                    }
                }
            }
        }
        out
    }

    /// Whether `self ∩ other = base`, with `base` required inside both.
    pub fn disjoint_over(&self, other: &Self, base: &Self) -> Result<bool, ClassError> {
        if !self.contains_subspace(base) || !other.contains_subspace(base) {
            return Err(ClassError::BaseNotContained);
        }
        Ok(self.intersection(other).dim() == base.dim())
    }
}

impl PartialEq for ClassSubspace {
    fn eq(&self, other: &Self) -> bool {
        if !self.is_rough() && !other.is_rough() {
            return self.rows == other.rows;
        }
        self.dim() == other.dim() && self.contains_subspace(other)
    }
}

impl Eq for ClassSubspace {}

impl Serialize for ClassSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::bigjson::vec::serialize(&self.kernels(), s)
    }
}

impl<'de> Deserialize<'de> for ClassSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ks = crate::bigjson::vec::deserialize(d)?;
        let classes: Vec<SquareClass> =
            ks.iter().map(SquareClass::from_kernel).collect::<Result<_, _>>().map_err(serde::de::Error::custom)?;
        Ok(Self::span(&classes))
    }
}

/// First class among the first `depth` stream elements outside `span`,
/// with its position in the stream.
pub fn vast_witness_indexed(
    stream: &mut ClassStream,
    span: &ClassSubspace,
    depth: usize,
) -> Result<(usize, SquareClass), ClassError> {
    for i in 0..depth {
        let c = stream.get(i)?;
        if !span.member(&c) {
            return Ok((i, c));
        }
    }
    Err(ClassError::DepthExhausted { depth })
}

pub fn vast_witness(stream: &mut ClassStream, span: &ClassSubspace, depth: usize) -> Result<SquareClass, ClassError> {
    vast_witness_indexed(stream, span, depth).map(|(_, c)| c)
}

/// Fiber of `y² = h(t)` over `t = c` is integral over the modeled field iff
/// `h(c)` is a nonzero nonsquare there.
pub fn cover_fiber_integral(h: &RatPoly, c: &BigRational, span: &ClassSubspace) -> Result<bool, ClassError> {
    let v = h.eval(c);
    if v.is_zero() {
        return Ok(false);
    }
    Ok(!span.member(&class_of(&v)?))
}
