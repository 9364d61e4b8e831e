//! Polynomials over 𝔽_p and the factor-degree pattern of a reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{PolyError, RatPoly};
use crate::factor::{is_prime_u64, pow_mod_u64};

/// Largest modulus accepted; keeps every coefficient product inside a `u64`.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        Self { p, coeffs: Vec::new() }
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    /// Coefficient-wise reduction; `None` when `p` divides a denominator.
    pub fn from_rational(f: &RatPoly, p: u64) -> Option<Self> {
        let pb = BigInt::from(p);
        let mut out = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            if c.denom().is_multiple_of(&pb) {
                return None;
            }
            let num = reduce_bigint(c.numer(), p);
            let den = reduce_bigint(c.denom(), p);
            out.push(num * inv_mod(den, p) % p);
        }
        Some(Self::new(p, out))
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading_coeff(), self.p);
        Self::new(self.p, self.coeffs.iter().map(|c| c * inv % self.p).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(self.p, (0..n).map(|i| (get(&self.coeffs, i) + get(&other.coeffs, i)) % self.p).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(self.p, (0..n).map(|i| (get(&self.coeffs, i) + self.p - get(&other.coeffs, i)) % self.p).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b % self.p) % self.p;
            }
        }
        Self::new(self.p, out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        if self.coeffs.len() <= dd {
            return (Self::zero(self.p), self.clone());
        }
        let p = self.p;
        let inv = inv_mod(divisor.leading_coeff(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = rem[i] * inv % p;
            if q == 0 {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = (rem[k] + p - q * dc % p) % p;
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        (Self::new(p, quot), Self::new(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % self.p) * c % self.p).collect(),
        )
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::new(self.p, vec![1]).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero(self.p);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::new(self.p, vec![c]));
        }
        acc
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod_u64(a, p - 2, p)
}

/// Multiset of irreducible-factor degrees of a reduction mod `prime`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDegreePattern {
    pub prime: u64,
    pub degrees: Vec<usize>,
}

impl FactorDegreePattern {
    pub fn total_degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// Order of the Frobenius element: lcm of the factor degrees.
    pub fn lcm(&self) -> u64 {
        self.degrees.iter().fold(1u64, |acc, &d| acc.lcm(&(d as u64)))
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial.
///
/// Each entry `(i, g)` has `g` equal to the product of all irreducible
/// factors of degree `i`.
pub fn distinct_degree_parts(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.modulus();
    let mut rest = f.monic();
    let mut parts = Vec::new();
    let x = FpPoly::x(p);
    let mut h = x.rem(&rest);
    let mut i = 1;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.pow_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree().unwrap_or(0) > 0 {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            parts.push((i, g));
        }
        i += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        let d = rest.degree().unwrap();
        parts.push((d, rest));
    }
    parts
}

/// Checks the good-prime conditions and returns the monic reduction.
pub(crate) fn good_reduction(f: &RatPoly, p: u64) -> Result<FpPoly, PolyError> {
    if p > MAX_MODULUS || !is_prime_u64(p) {
        return Err(PolyError::BadPrime { p, reason: "modulus must be a prime below 2^32" });
    }
    let reduced =
        FpPoly::from_rational(f, p).ok_or(PolyError::BadPrime { p, reason: "divides a coefficient denominator" })?;
    if reduced.degree() != f.degree() || f.is_zero() {
        return Err(PolyError::BadPrime { p, reason: "divides the leading coefficient" });
    }
    check_separable(&reduced)?;
    Ok(reduced.monic())
}

/// With the degree preserved, `disc(f) ≡ 0 (mod p)` exactly when the
/// reduction shares a factor with its derivative.
pub(crate) fn check_separable(reduced: &FpPoly) -> Result<(), PolyError> {
    let p = reduced.modulus();
    if reduced.degree().unwrap_or(0) >= 1 && reduced.gcd(&reduced.derivative()).degree() != Some(0) {
        return Err(PolyError::BadPrime { p, reason: "divides the discriminant" });
    }
    Ok(())
}

pub fn factor_degrees_mod_p(f: &RatPoly, p: u64) -> Result<FactorDegreePattern, PolyError> {
    let reduced = good_reduction(f, p)?;
    Ok(pattern_of(&reduced))
}

/// Factor degrees of `f^k mod p`, composing in `F_p[x]` so the iterate is
/// never expanded over ℚ.
pub fn factor_degrees_of_iterate(f: &RatPoly, k: usize, p: u64) -> Result<FactorDegreePattern, PolyError> {
    if p > MAX_MODULUS || !is_prime_u64(p) {
        return Err(PolyError::BadPrime { p, reason: "modulus must be a prime below 2^32" });
    }
    let base =
        FpPoly::from_rational(f, p).ok_or(PolyError::BadPrime { p, reason: "divides a coefficient denominator" })?;
    if base.degree() != f.degree() || f.is_zero() {
        return Err(PolyError::BadPrime { p, reason: "divides the leading coefficient" });
    }
    let mut g = FpPoly::x(p);
    for _ in 0..k {
        g = base.compose(&g);
    }
    check_separable(&g)?;
    Ok(pattern_of(&g.monic()))
}

pub(crate) fn pattern_of(reduced: &FpPoly) -> FactorDegreePattern {
    let mut degrees = Vec::new();
    for (i, g) in distinct_degree_parts(reduced) {
        let count = g.degree().unwrap_or(0) / i;
        degrees.extend(std::iter::repeat_n(i, count));
    }
    degrees.sort_unstable();
    FactorDegreePattern { prime: reduced.modulus(), degrees }
}
