//! Test-side oracles, written without the library's algorithms.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use arbor_core::exactpoly::RatPoly;
use arbor_core::treegroup::Portrait;

/// Determinant by fraction-exact Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &m[r][col] / &p;
            if f.is_zero() {
                continue;
            }
            let (upper, lower) = m.split_at_mut(r);
            for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= &f * y;
            }
        }
    }
    det
}

pub fn sylvester_resultant(f: &RatPoly, g: &RatPoly) -> BigRational {
    let (m, n) = (f.degree().unwrap(), g.degree().unwrap());
    let size = m + n;
    let mut rows = vec![vec![BigRational::zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    determinant(rows)
}

/// `(-1)^(n(n-1)/2) Res(f, f') / lc(f)` through the Sylvester matrix.
pub fn sylvester_discriminant(f: &RatPoly) -> BigRational {
    let n = f.degree().unwrap();
    if n == 1 {
        return BigRational::one();
    }
    let lc = f.coeffs().last().unwrap().clone();
    let v = sylvester_resultant(f, &f.derivative()) / lc;
    if (n * (n - 1) / 2) % 2 == 1 {
        -v
    } else {
        v
    }
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Leaf digits of index `i` at depth `n`, most significant first.
pub fn digits(i: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    let mut r = i;
    for slot in out.iter_mut().rev() {
        *slot = r % d;
        r /= d;
    }
    out
}

/// Level-n permutation obtained by walking labels from the root.
pub fn expand(g: &Portrait, n: usize) -> Vec<usize> {
    let d = g.arity();
    (0..d.pow(n as u32))
        .map(|leaf| {
            let path = digits(leaf, d, n);
            let mut image = 0;
            for j in 0..n {
                image = image * d + g.label(&path[..j]).images()[path[j]];
            }
            image
        })
        .collect()
}

pub fn inversion_sign(p: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn perm_order(p: &[usize]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut order = 1u64;
    for s in 0..p.len() {
        let mut len = 0u64;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len > 0 {
            order = order.lcm(&len);
        }
    }
    order
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Permutations of the `d^k` leaves that preserve every common-ancestor
/// depth, counted by running through all of `S_{d^k}` (Heap's algorithm).
pub fn count_tree_automorphisms(d: usize, k: usize) -> u64 {
    let n = d.pow(k as u32);
    let addr: Vec<Vec<usize>> = (0..n).map(|i| digits(i, d, k)).collect();
    let depth: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| common_prefix(&addr[i], &addr[j])).collect()).collect();
    let preserves = |p: &[usize]| (0..n).all(|i| (i + 1..n).all(|j| depth[i][j] == depth[p[i]][p[j]]));
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut count = u64::from(preserves(&p));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            count += u64::from(preserves(&p));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Squarefree by trial division; `None` when the number is too large.
pub fn squarefree_by_trial(n: &BigInt) -> Option<bool> {
    let mut m = n.abs();
    if m > BigInt::from(10u64.pow(14)) {
        return None;
    }
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            m /= &p;
            if (&m % &p).is_zero() {
                return Some(false);
            }
        }
        p += 1;
    }
    Some(true)
}

/// Whether `q / k` is the square of a rational.
pub fn differs_by_square(q: &BigRational, k: &BigInt) -> bool {
    let r = q / BigRational::from_integer(k.clone());
    is_perfect_square(r.numer()) && is_perfect_square(r.denom())
}
