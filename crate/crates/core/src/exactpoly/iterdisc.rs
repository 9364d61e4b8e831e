//! Discriminants of iterates without expanding the iterates.
//!
//! For `h = g ∘ f` with `deg f = d`, `lc f = a`, `deg g = e`, `lc g = b`,
//! `N = de`:
//!
//! ```text
//! disc(h) = (-1)^(N(N-1)/2 + d·e(e-1)/2 + N(d-1))
//!           · lc(h)^(N-1-d) · b^(-d(e-2)) · disc(g)^d · Res(f', h)
//! ```
//!
//! With `g = f^(m-1)` every leading coefficient is a power of `a`, and
//! `Res(f', h)` only needs `h mod f'`, which is obtained by iterating `f` in
//! `ℚ[x]/(f')`. Each level is stored as a short list of prime-power-sized
//! factors so square classes can be read off without factoring `disc(h)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rat, resultant, PolyError, RatPoly};

/// `disc(f^m) = (-1)^negative · ∏ base^exp · disc(f^(m-1))^previous_exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFactors {
    pub level: usize,
    pub negative: bool,
    pub powers: Vec<(BigRational, BigInt)>,
    pub previous_exponent: usize,
}

impl LevelFactors {
    /// True when the level introduces a repeated root.
    pub fn vanishes(&self) -> bool {
        self.powers.iter().any(|(b, _)| b.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct IterateDiscriminants {
    f: RatPoly,
    degree: usize,
    lc: BigRational,
    deriv: RatPoly,
    residue: RatPoly,
    levels: Vec<LevelFactors>,
    exact: Vec<BigRational>,
}

pub(crate) fn rational_pow(base: &BigRational, exp: &BigInt) -> BigRational {
    if exp.is_negative() {
        return rational_pow(&base.recip(), &-exp);
    }
    let mut acc = BigRational::one();
    let mut sq = base.clone();
    let mut e = exp.clone();
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            acc *= &sq;
        }
        e /= &two;
        if !e.is_zero() {
            sq = &sq * &sq;
        }
    }
    acc
}

impl IterateDiscriminants {
    pub fn new(f: &RatPoly) -> Result<Self, PolyError> {
        let degree = match f.degree() {
            Some(d) if d >= 2 => d,
            _ => return Err(PolyError::DegreeTooSmall { needed: 2, got: f.signed_degree().to_string() }),
        };
        let deriv = f.derivative();
        Ok(Self {
            f: f.clone(),
            degree,
            lc: f.leading_coeff().expect("nonzero").clone(),
            residue: RatPoly::x().rem(&deriv),
            deriv,
            levels: Vec::new(),
            exact: Vec::new(),
        })
    }

    pub fn poly(&self) -> &RatPoly {
        &self.f
    }

    pub fn computed_levels(&self) -> usize {
        self.levels.len()
    }

    fn step_residue(&mut self) {
        let mut acc = RatPoly::zero();
        for c in self.f.coeffs().iter().rev() {
            acc = (&(&acc * &self.residue) + &RatPoly::constant(c.clone())).rem(&self.deriv);
        }
        self.residue = acc;
    }

    fn push_level(&mut self) -> Result<(), PolyError> {
        let m = self.levels.len() + 1;
        let d = BigInt::from(self.degree);
        let e = num_traits::pow(d.clone(), m - 1);
        let n = &e * &d;
        let one = BigInt::one();
        let dm1 = &d - &one;

        self.step_residue();
        let (core, deg_r) = match self.residue.degree() {
            None => (BigRational::zero(), 0usize),
            Some(dr) => (resultant(&self.deriv, &self.residue)?, dr),
        };

        let lc_h_exp = (&n - &one) / &dm1;
        let lc_g_exp = (&e - &one) / &dm1;
        let a_exp = &lc_h_exp * (&n - &one - &d) - &lc_g_exp * &d * (&e - BigInt::from(2));
        let lcd_exp = &n - BigInt::from(deg_r);
        let sign = (&n * (&n - &one) / 2u32) + (&d * &e * (&e - &one) / 2u32) + (&n * &dm1);

        let lcd = &self.lc * rat(self.degree as i64);
        self.levels.push(LevelFactors {
            level: m,
            negative: sign.is_odd(),
            powers: vec![(self.lc.clone(), a_exp), (lcd, lcd_exp), (core, one)],
            previous_exponent: self.degree,
        });
        Ok(())
    }

    pub fn extend_to(&mut self, level: usize) -> Result<(), PolyError> {
        while self.levels.len() < level {
            self.push_level()?;
        }
        Ok(())
    }

    /// Factored form of `disc(f^m)` relative to the previous level.
    pub fn level(&mut self, m: usize) -> Result<&LevelFactors, PolyError> {
        assert!(m >= 1, "levels start at 1");
        self.extend_to(m)?;
        Ok(&self.levels[m - 1])
    }

    /// Exact `disc(f^m)`. The value grows roughly like `2^(d^m)` bits, so this
    /// is meant for moderate levels.
    pub fn exact(&mut self, m: usize) -> Result<BigRational, PolyError> {
        self.extend_to(m)?;
        while self.exact.len() < m {
            let k = self.exact.len();
            let prev = if k == 0 { BigRational::one() } else { self.exact[k - 1].clone() };
            let lf = &self.levels[k];
            let mut val = rational_pow(&prev, &BigInt::from(lf.previous_exponent));
            for (base, exp) in &lf.powers {
                if base.is_zero() {
                    val = BigRational::zero();
                    break;
                }
                val *= rational_pow(base, exp);
            }
            if lf.negative {
                val = -val;
            }
            self.exact.push(val);
        }
        Ok(self.exact[m - 1].clone())
    }

    /// First level whose discriminant vanishes, scanning up to `m`.
    pub fn first_inseparable(&mut self, m: usize) -> Result<Option<usize>, PolyError> {
        self.extend_to(m)?;
        Ok(self.levels[..m].iter().find(|l| l.vanishes()).map(|l| l.level))
    }

    /// Degree of `f^m`, if it fits in a machine word.
    pub fn iterate_degree(&self, m: usize) -> Option<u64> {
        (self.degree as u64).checked_pow(m.to_u32()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::discriminant;
    use proptest::prelude::*;

    fn p(s: &str) -> RatPoly {
        s.parse().unwrap()
    }

    #[test]
    fn matches_known_values() {
        let mut it = IterateDiscriminants::new(&p("x^2-3")).unwrap();
        assert_eq!(it.exact(1).unwrap(), rat(12));
        assert_eq!(it.exact(2).unwrap(), rat(13824));
        let mut it = IterateDiscriminants::new(&p("x^2+1")).unwrap();
        assert_eq!(it.exact(1).unwrap(), rat(-4));
        assert_eq!(it.exact(2).unwrap(), rat(512));
    }

    #[test]
    fn detects_inseparable_iterates() {
        let mut it = IterateDiscriminants::new(&p("x^2")).unwrap();
        assert_eq!(it.first_inseparable(3).unwrap(), Some(1));
        // x^2 - 1: 0 -> -1 -> 0, so the second iterate has a double root at 0
        let mut it = IterateDiscriminants::new(&p("x^2-1")).unwrap();
        assert_eq!(it.first_inseparable(3).unwrap(), Some(2));
        assert_eq!(it.exact(2).unwrap(), rat(0));
    }

    #[test]
    fn rejects_linear_input() {
        assert!(IterateDiscriminants::new(&p("3*x+1")).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = RatPoly> {
        (2usize..=3, prop::collection::vec((-4i64..=4, 1i64..=3), 4)).prop_map(|(deg, cs)| {
            let mut coeffs: Vec<BigRational> =
                cs.into_iter().take(deg + 1).map(|(n, d)| BigRational::new(n.into(), d.into())).collect();
            if coeffs[deg].is_zero() {
                coeffs[deg] = rat(2);
            }
            RatPoly::new(coeffs)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn recursion_matches_direct_discriminant(f in arb_poly()) {
            let mut it = IterateDiscriminants::new(&f).unwrap();
            let max_level = if f.degree() == Some(2) { 3 } else { 2 };
            for m in 1..=max_level {
                let direct = discriminant(&f.iterate(m).unwrap()).unwrap();
                prop_assert_eq!(it.exact(m).unwrap(), direct, "level {}", m);
            }
        }
    }
}
