//! Exact univariate polynomials over ℚ and over prime fields.

mod iterdisc;
mod modp;
mod parse;
mod resultant;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::factor::{self, FactorError};

pub use iterdisc::{IterateDiscriminants, LevelFactors};
pub use modp::{distinct_degree_parts, factor_degrees_mod_p, factor_degrees_of_iterate, FactorDegreePattern, FpPoly};
pub use parse::ParseError;
pub use resultant::{discriminant, resultant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("resultant of two zero polynomials is undefined")]
    BothZero,
    #[error("polynomial of degree at least {needed} required, got {got}")]
    DegreeTooSmall { needed: usize, got: String },
    #[error("{p} is not a good prime: {reason}")]
    BadPrime { p: u64, reason: &'static str },
    #[error("square class of zero is undefined")]
    ZeroInput,
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Polynomial with exact rational coefficients, lowest degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `coeffs.last()` is the leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `x^2 + c`, the family used throughout the construction engine.
    pub fn quadratic_family(c: &BigInt) -> Self {
        Self::new(vec![BigRational::from_integer(c.clone()), BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`, for messages and parity tests.
    pub fn signed_degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, at: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * at + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect())
    }

    pub fn scale(&self, by: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * by).collect())
    }

    /// `self ∘ inner`, i.e. `self(inner(x))`.
    pub fn compose(&self, inner: &RatPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &RatPoly::constant(c.clone());
        }
        acc
    }

    /// The k-fold iterate `f∘f∘…∘f`; the zeroth iterate is `x`.
    pub fn iterate(&self, k: usize) -> Result<RatPoly, PolyError> {
        if self.degree().unwrap_or(0) < 1 {
            return Err(PolyError::DegreeTooSmall { needed: 1, got: self.signed_degree().to_string() });
        }
        let mut acc = RatPoly::x();
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = &rem[i] * &lc_inv;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &q * dc;
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    /// Splits `self = scale · prim` with `prim` a primitive integer polynomial
    /// whose leading coefficient is positive. Zero maps to `(0, [])`.
    pub fn primitive_decomposition(&self) -> (BigRational, Vec<BigInt>) {
        if self.is_zero() {
            return (BigRational::zero(), Vec::new());
        }
        let den_lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * BigRational::from_integer(den_lcm.clone())).to_integer()).collect();
        let mut content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().is_some_and(Signed::is_negative) {
            content = -content;
        }
        let prim = ints.iter().map(|c| c / &content).collect();
        (BigRational::new(content, den_lcm), prim)
    }

    pub fn from_integer_coeffs(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    /// Lowest common denominator of the coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p` or `p/q` (whitespace around the slash allowed).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if c.is_negative() {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            let mag = c.abs();
            if i == 0 {
                f.write_str(&format_rational(&mag))?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{}*", format_rational(&mag))?;
            }
            if i == 1 {
                f.write_str("x")?;
            } else {
                write!(f, "x^{i}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for RatPoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_poly(s)
    }
}

impl Serialize for RatPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The signed squarefree integer `s` with `q / s` a rational square.
pub fn squarefree_kernel(q: &BigRational) -> Result<BigInt, PolyError> {
    if q.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    Ok(factor::squarefree_part(&(q.numer() * q.denom()))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> RatPoly {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn compose_examples() {
        assert_eq!(p("x^2-3").compose(&p("x^2-3")), p("x^4-6*x^2+6"));
        assert_eq!(p("x^2+1").compose(&p("x^2+1")), p("x^4+2*x^2+2"));
        let g = p("1/2*x^3 + x - 7");
        assert_eq!(g.compose(&RatPoly::x()), g);
    }

    #[test]
    fn iterate_examples() {
        let f = p("x^2-3");
        assert_eq!(f.iterate(0).unwrap(), RatPoly::x());
        assert_eq!(f.iterate(1).unwrap(), f);
        assert_eq!(f.iterate(2).unwrap(), p("x^4-6*x^2+6"));
        assert!(RatPoly::constant(rat(3)).iterate(2).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(squarefree_kernel(&rat(12)).unwrap(), BigInt::from(3));
        assert_eq!(squarefree_kernel(&rat(-4)).unwrap(), BigInt::from(-1));
        assert_eq!(squarefree_kernel(&rat(13824)).unwrap(), BigInt::from(6));
        assert_eq!(squarefree_kernel(&q(9, 4)).unwrap(), BigInt::from(1));
        assert_eq!(squarefree_kernel(&q(-50, 1)).unwrap(), BigInt::from(-2));
        assert_eq!(squarefree_kernel(&q(1, 8)).unwrap(), BigInt::from(2));
        assert_eq!(squarefree_kernel(&rat(0)), Err(PolyError::ZeroInput));
    }

    #[test]
    fn display_round_trips() {
        for s in ["x^2-3", "1/2*x^3+x-7", "-x^2+1", "0", "5", "-2/3*x", "x"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("1/2*x^3 + x - 7").to_string(), "1/2*x^3+x-7");
    }

    #[test]
    fn division_identity() {
        let a = p("x^5 - 3*x^2 + 1/3");
        let b = p("2*x^2 + x - 1");
        let (quo, rem) = a.div_rem(&b);
        assert!(rem.degree().is_none_or(|d| d < 2));
        assert_eq!(&(&quo * &b) + &rem, a);
    }

    #[test]
    fn primitive_decomposition_reassembles() {
        let f = p("-1/2*x^2 + 3/4*x - 6");
        let (scale, prim) = f.primitive_decomposition();
        assert!(prim.last().unwrap().is_positive());
        assert_eq!(RatPoly::from_integer_coeffs(&prim).scale(&scale), f);
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
        prop::collection::vec((-5i64..=5, 1i64..=3), 1..=max_deg + 1)
            .prop_map(|cs| RatPoly::new(cs.into_iter().map(|(n, d)| q(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn compose_is_associative(h in arb_poly(2), g in arb_poly(2), f in arb_poly(2)) {
            prop_assert_eq!(h.compose(&g).compose(&f), h.compose(&g.compose(&f)));
        }

        #[test]
        fn kernel_ignores_square_factors(n in -200i64..200, d in 1i64..50, rn in 1i64..40, rd in 1i64..40) {
            prop_assume!(n != 0);
            let x = q(n, d);
            let r = q(rn, rd);
            prop_assert_eq!(squarefree_kernel(&(&x * &r * &r)).unwrap(), squarefree_kernel(&x).unwrap());
        }

        #[test]
        fn display_parse_round_trip(f in arb_poly(4)) {
            prop_assert_eq!(f.to_string().parse::<RatPoly>().unwrap(), f);
        }
    }
}
