//! Integer factorization for square-class kernels and supernatural degrees.
//!
//! Trial division by a fixed table of small primes, Miller–Rabin with fixed
//! bases for primality, perfect-square splitting, and Brent's variant of
//! Pollard rho for whatever composite cofactor remains.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest prime covered by the trial-division table.
pub const TRIAL_DIVISION_BOUND: u32 = 65_536;

/// Default number of rho iterations spent on one factorization.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("cannot factor zero")]
    Zero,
    #[error("factorization budget exhausted on a {bits}-bit composite cofactor")]
    BudgetExhausted { bits: u64 },
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u32).collect()
    })
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_u64(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

// The first twelve bases are a proof of primality below 3.3e24; the
// remaining ones only shrink the error probability above that bound.
const MR_BASES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Miller–Rabin with a fixed base set.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for a in MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_perfect_square(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

fn rho_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    let f = |x: u64| ((mul_mod_u64(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
            *budget = budget.saturating_sub(BATCH);
            if *budget == 0 && g == 1 {
                return None;
            }
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: u64, budget: &mut u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let one = BigUint::one();
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = one.clone();
    let mut g = one.clone();
    let mut r: u64 = 1;
    const BATCH: u64 = 128;
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = (&q * absdiff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
            *budget = budget.saturating_sub(BATCH);
            if *budget == 0 && g == one {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if g > one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Finds a nontrivial divisor of an odd composite that is not a perfect square.
fn split_composite(n: &BigUint, budget: &mut u64) -> Result<BigUint, FactorError> {
    for c in 1u64.. {
        if *budget == 0 {
            break;
        }
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c, budget).map(BigUint::from),
            None => rho_big(n, c, budget),
        };
        if let Some(d) = found {
            return Ok(d);
        }
    }
    Err(FactorError::BudgetExhausted { bits: n.bits() })
}

/// Primes with exponents, plus the cofactors that resisted splitting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialFactorization {
    pub primes: BTreeMap<BigUint, u32>,
    /// Pairwise coprime composites, coprime to every listed prime, none a
    /// perfect square.
    pub unsplit: BTreeMap<BigUint, u32>,
}

impl PartialFactorization {
    pub fn is_complete(&self) -> bool {
        self.unsplit.is_empty()
    }
}

fn divide_out(m: &mut BigUint, p: &BigUint) -> u32 {
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        *m = q;
        e += 1;
    }
}

/// Makes the unsplit cofactors pairwise coprime and coprime to the primes.
fn refine(primes: &mut BTreeMap<BigUint, u32>, unsplit: Vec<(BigUint, u32)>) -> BTreeMap<BigUint, u32> {
    let mut work = unsplit;
    let mut done: Vec<(BigUint, u32)> = Vec::new();
    while let Some((mut m, e)) = work.pop() {
        for p in primes.keys().cloned().collect::<Vec<_>>() {
            let k = divide_out(&mut m, &p);
            if k > 0 {
                *primes.get_mut(&p).expect("listed") += k * e;
            }
        }
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *primes.entry(m.clone()).or_insert(0) += e;
            work.append(&mut done);
            continue;
        }
        if let Some(r) = is_perfect_square(&m) {
            work.push((r, 2 * e));
            continue;
        }
        if let Some(i) = done.iter().position(|(d, _)| *d == m) {
            done[i].1 += e;
            continue;
        }
        if let Some(i) = done.iter().position(|(d, _)| !d.gcd(&m).is_one()) {
            let (d, de) = done.swap_remove(i);
            let g = d.gcd(&m);
            work.push((&m / &g, e));
            work.push((g.clone(), e));
            work.push((&d / &g, de));
            work.push((g, de));
            continue;
        }
        done.push((m, e));
    }
    done.into_iter().collect()
}

/// Factorization that stops splitting a cofactor once the rho budget is
/// spent, returning it unsplit instead of failing.
pub fn factorize_partial(n: &BigUint, mut budget: u64) -> Result<PartialFactorization, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = n.clone();
    let tz = rest.trailing_zeros().unwrap_or(0);
    if tz > 0 {
        out.insert(BigUint::from(2u32), tz as u32);
        rest >>= tz;
    }
    for &p in &small_primes()[1..] {
        if rest.is_one() {
            break;
        }
        let pb = p as u64;
        if let Some(r) = rest.to_u64() {
            if pb * pb > r {
                break;
            }
        }
        let e = divide_out(&mut rest, &BigUint::from(p));
        if e > 0 {
            out.insert(BigUint::from(p), e);
        }
    }
    // Every prime factor of `rest` now exceeds the trial bound.
    let mut unsplit = Vec::new();
    let mut stack = vec![(rest, 1u32)];
    while let Some((m, mult)) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *out.entry(m).or_insert(0) += mult;
            continue;
        }
        if let Some(r) = is_perfect_square(&m) {
            stack.push((r, mult * 2));
            continue;
        }
        match split_composite(&m, &mut budget) {
            Ok(d) => {
                let other = &m / &d;
                stack.push((d, mult));
                stack.push((other, mult));
            }
            Err(_) => unsplit.push((m, mult)),
        }
    }
    let unsplit = if unsplit.is_empty() { BTreeMap::new() } else { refine(&mut out, unsplit) };
    Ok(PartialFactorization { primes: out, unsplit })
}

/// Prime factorization of a positive integer as an ordered prime → exponent map.
pub fn factorize_with_budget(n: &BigUint, budget: u64) -> Result<BTreeMap<BigUint, u32>, FactorError> {
    let pf = factorize_partial(n, budget)?;
    match pf.unsplit.keys().map(BigUint::bits).max() {
        Some(bits) => Err(FactorError::BudgetExhausted { bits }),
        None => Ok(pf.primes),
    }
}

pub fn factorize(n: &BigUint) -> Result<BTreeMap<BigUint, u32>, FactorError> {
    factorize_with_budget(n, DEFAULT_RHO_BUDGET)
}

/// Product of the primes dividing `n` to an odd power, carrying the sign of `n`.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    let factors = factorize(n.magnitude())?;
    let core: BigUint = factors.into_iter().filter(|(_, e)| e % 2 == 1).map(|(p, _)| p).product();
    Ok(BigInt::from_biguint(n.sign(), core))
}

/// True when no prime divides `n` more than once.
pub fn is_squarefree(n: &BigInt) -> Result<bool, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    Ok(factorize(n.magnitude())?.values().all(|&e| e == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_factor(mut n: u64) -> BTreeMap<BigUint, u32> {
        let mut out = BTreeMap::new();
        let mut p = 2;
        while p * p <= n {
            while n.is_multiple_of(p) {
                *out.entry(BigUint::from(p)).or_insert(0) += 1;
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            *out.entry(BigUint::from(n)).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn small_numbers_match_naive_trial_division() {
        for n in 1u64..3000 {
            assert_eq!(factorize(&BigUint::from(n)).unwrap(), naive_factor(n), "n = {n}");
        }
    }

    #[test]
    fn splits_products_of_large_primes() {
        // two primes above the trial bound
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        let n = BigUint::from(p) * BigUint::from(q) * BigUint::from(q);
        let f = factorize(&n).unwrap();
        assert_eq!(f.get(&BigUint::from(p)), Some(&1));
        assert_eq!(f.get(&BigUint::from(q)), Some(&2));

        // 2^64 + 1 = 274177 * 67280421310721
        let n = (BigUint::one() << 64) + BigUint::one();
        let f = factorize(&n).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.get(&BigUint::from(274_177u64)), Some(&1));
        assert_eq!(f.get(&BigUint::from(67_280_421_310_721u64)), Some(&1));
    }

    #[test]
    fn squarefree_part_examples() {
        assert_eq!(squarefree_part(&BigInt::from(12)).unwrap(), BigInt::from(3));
        assert_eq!(squarefree_part(&BigInt::from(-4)).unwrap(), BigInt::from(-1));
        assert_eq!(squarefree_part(&BigInt::from(13824)).unwrap(), BigInt::from(6));
        assert_eq!(squarefree_part(&BigInt::from(1)).unwrap(), BigInt::from(1));
        assert_eq!(squarefree_part(&BigInt::zero()), Err(FactorError::Zero));
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let table = small_primes();
        for n in 0u64..20_000 {
            let expect = table.binary_search(&(n as u32)).is_ok();
            assert_eq!(is_prime_u64(n), expect, "n = {n}");
        }
        // Mersenne prime 2^89 - 1 and a Carmichael number
        let m89 = (BigUint::one() << 89) - BigUint::one();
        assert!(is_probable_prime(&m89));
        assert!(!is_probable_prime(&BigUint::from(3_215_031_751u64)));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // product of two 62-bit primes with a starved budget
        let p = BigUint::from(4_611_686_018_427_388_039u64);
        let q = BigUint::from(4_611_686_018_427_387_847u64);
        assert!(is_probable_prime(&p) && is_probable_prime(&q));
        let err = factorize_with_budget(&(&p * &q), 256).unwrap_err();
        assert!(matches!(err, FactorError::BudgetExhausted { .. }));
    }

    #[test]
    fn starved_budget_leaves_coprime_cofactors() {
        let p = BigUint::from(4_611_686_018_427_388_039u64);
        let q = BigUint::from(4_611_686_018_427_387_847u64);
        let pq = &p * &q;
        let n = BigUint::from(12u32) * &pq * &pq * &pq;
        let pf = factorize_partial(&n, 0).unwrap();
        assert_eq!(pf.primes, BTreeMap::from([(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]));
        assert_eq!(pf.unsplit, BTreeMap::from([(&pq * &pq * &pq, 1)]));
        assert!(!pf.is_complete());
    }

    #[test]
    fn refinement_splits_shared_factors() {
        let big = |a: u64, b: u64| BigUint::from(a) * BigUint::from(b);
        let a = big(1_000_003, 1_000_033);
        let b = big(1_000_037, 1_000_039);
        let c = big(1_000_081, 1_000_099);
        let mut primes = BTreeMap::new();
        let out = refine(&mut primes, vec![(&a * &b, 1), (&a * &c, 1)]);
        assert_eq!(out, BTreeMap::from([(a.clone(), 2), (b.clone(), 1), (c, 1)]));
        let r = BigUint::from(1_000_117u64);
        let mut primes = BTreeMap::from([(r.clone(), 1)]);
        let out = refine(&mut primes, vec![(&r * &a, 1), (&b * &b, 1)]);
        assert_eq!(primes, BTreeMap::from([(r, 2)]));
        assert_eq!(out, BTreeMap::from([(a, 1), (b, 2)]));
    }
}
