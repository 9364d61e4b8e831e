//! Resultants by the subresultant pseudo-remainder sequence over ℤ.
//!
//! Convention: `Res(f, g) = lc(f)^deg(g) · ∏ g(α)` over the roots α of f,
//! which equals the Sylvester determinant with the rows of f on top.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::{PolyError, RatPoly};

type ZPoly = Vec<BigInt>;

fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn deg(p: &ZPoly) -> usize {
    p.len() - 1
}

fn content(p: &ZPoly) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn div_exact(p: &ZPoly, by: &BigInt) -> ZPoly {
    p.iter()
        .map(|c| {
            debug_assert!((c % by).is_zero());
            c / by
        })
        .collect()
}

/// `lc(b)^(deg a - deg b + 1) · a mod b`.
fn pseudo_rem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let db = deg(b);
    let lb = &b[db];
    let mut r = a.clone();
    let mut e = deg(a) - db + 1;
    while !r.is_empty() && deg(&r) >= db {
        let k = deg(&r) - db;
        let lr = r[deg(&r)].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] -= &lr * bc;
        }
        trim(&mut r);
        e -= 1;
    }
    let scale = Pow::pow(lb, e);
    r.iter().map(|c| c * &scale).collect()
}

/// Subresultant algorithm for integer polynomials of degree at least one.
fn resultant_z(a: &ZPoly, b: &ZPoly) -> BigInt {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut negate = false;
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
        negate = deg(&a) % 2 == 1 && deg(&b) % 2 == 1;
    }
    let ca = content(&a);
    let cb = content(&b);
    a = div_exact(&a, &ca);
    b = div_exact(&b, &cb);
    let t: BigInt = Pow::pow(&ca, deg(&b)) * Pow::pow(&cb, deg(&a));
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (deg(&a), deg(&b));
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            negate = !negate;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        if r.is_empty() {
            return BigInt::zero();
        }
        let divisor = &g * Pow::pow(&h, delta);
        b = div_exact(&r, &divisor);
        g = a[deg(&a)].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => Pow::pow(&g, delta) / Pow::pow(&h, delta - 1),
        };
        if deg(&b) == 0 {
            break;
        }
    }
    let da = deg(&a);
    let lb = b[0].clone();
    let h = if da == 1 { lb } else { Pow::pow(&lb, da) / Pow::pow(&h, da - 1) };
    let out = t * h;
    if negate {
        -out
    } else {
        out
    }
}

/// Resultant of two rational polynomials.
///
/// A zero argument against a nonzero one yields zero; two zeros are an error.
pub fn resultant(f: &RatPoly, g: &RatPoly) -> Result<BigRational, PolyError> {
    let (df, dg) = match (f.degree(), g.degree()) {
        (None, None) => return Err(PolyError::BothZero),
        (None, _) | (_, None) => return Ok(BigRational::zero()),
        (Some(df), Some(dg)) => (df, dg),
    };
    if df == 0 {
        return Ok(Pow::pow(&f.coeffs()[0], dg));
    }
    if dg == 0 {
        return Ok(Pow::pow(&g.coeffs()[0], df));
    }
    let (sf, pf) = f.primitive_decomposition();
    let (sg, pg) = g.primitive_decomposition();
    let core = BigRational::from_integer(resultant_z(&pf, &pg));
    Ok(Pow::pow(&sf, dg) * Pow::pow(&sg, df) * core)
}

/// `disc(f) = (-1)^(n(n-1)/2) · Res(f, f') / lc(f)` for `n = deg f ≥ 1`.
///
/// Zero signals a repeated root.
pub fn discriminant(f: &RatPoly) -> Result<BigRational, PolyError> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(PolyError::DegreeTooSmall { needed: 1, got: f.signed_degree().to_string() }),
    };
    let res = resultant(f, &f.derivative())?;
    let lc = f.leading_coeff().expect("nonzero");
    let val = res / lc;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -val } else { val })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;
    use proptest::prelude::*;

    fn p(s: &str) -> RatPoly {
        s.parse().unwrap()
    }

    /// Sylvester matrix determinant by cofactor-free Gaussian elimination over ℚ.
    fn sylvester(f: &RatPoly, g: &RatPoly) -> BigRational {
        let (m, n) = (f.degree().unwrap(), g.degree().unwrap());
        let size = m + n;
        if size == 0 {
            return BigRational::one();
        }
        let mut a = vec![vec![BigRational::zero(); size]; size];
        for i in 0..n {
            for j in 0..=m {
                a[i][i + j] = f.coeff(m - j);
            }
        }
        for i in 0..m {
            for j in 0..=n {
                a[n + i][i + j] = g.coeff(n - j);
            }
        }
        let mut det = BigRational::one();
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            let pv = a[col][col].clone();
            det *= &pv;
            for r in col + 1..size {
                let factor = &a[r][col] / &pv;
                if factor.is_zero() {
                    continue;
                }
                let (upper, lower) = a.split_at_mut(r);
                for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= &factor * y;
                }
            }
        }
        det
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p("x-5"), &p("x-2")).unwrap(), rat(3));
        assert_eq!(resultant(&p("x^2-3"), &p("2*x")).unwrap(), rat(-12));
        assert_eq!(resultant(&p("x^3+x+1"), &p("1")).unwrap(), rat(1));
        assert_eq!(resultant(&p("3"), &p("x^2+1")).unwrap(), rat(9));
        assert_eq!(resultant(&RatPoly::zero(), &RatPoly::zero()), Err(PolyError::BothZero));
        assert_eq!(resultant(&RatPoly::zero(), &p("x")).unwrap(), rat(0));
        // common root
        assert_eq!(resultant(&p("x^2-1"), &p("x^3-1")).unwrap(), rat(0));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p("x^2-3")).unwrap(), rat(12));
        assert_eq!(discriminant(&p("x^4-6*x^2+6")).unwrap(), rat(13824));
        assert_eq!(discriminant(&p("x^2+1")).unwrap(), rat(-4));
        assert_eq!(discriminant(&p("x^2")).unwrap(), rat(0));
        assert_eq!(discriminant(&p("2*x+1")).unwrap(), rat(1));
        // x^3 + p x + q has discriminant -4p^3 - 27q^2
        assert_eq!(discriminant(&p("x^3-2*x+5")).unwrap(), rat(32 - 675));
        assert!(discriminant(&p("7")).is_err());
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
        prop::collection::vec((-6i64..=6, 1i64..=4), 1..=max_deg + 1)
            .prop_map(|cs| RatPoly::new(cs.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect()))
    }

    proptest! {
        #[test]
        fn subresultant_matches_sylvester(f in arb_poly(6), g in arb_poly(6)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            prop_assert_eq!(resultant(&f, &g).unwrap(), sylvester(&f, &g));
        }

        #[test]
        fn swapping_arguments_follows_sign_rule(f in arb_poly(5), g in arb_poly(5)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let sign = if f.degree().unwrap() * g.degree().unwrap() % 2 == 1 { -1 } else { 1 };
            prop_assert_eq!(resultant(&f, &g).unwrap(), resultant(&g, &f).unwrap() * rat(sign));
        }
    }
}
