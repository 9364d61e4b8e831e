//! Fixed enumerations of covers, vast specifications and rational points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::exactpoly::RatPoly;
use crate::sqclass::{ClassError, ClassSubspace, DiscClasses, SquareClass};

/// Cantor pairing: position `j ≥ 1` to `(a, b)` with `a + b = s` walking
/// each diagonal `s = 2, 3, …` by ascending `a`.
pub fn diagonal(j: usize) -> (usize, usize) {
    assert!(j >= 1, "positions start at 1");
    let mut s = 2;
    let mut rest = j;
    while rest > s - 1 {
        rest -= s - 1;
        s += 1;
    }
    (rest, s - rest)
}

fn key(v: i64) -> (i64, bool) {
    (v.abs(), v < 0)
}

fn coeff_range(h: i64) -> Vec<i64> {
    let mut vs: Vec<i64> = (-h..=h).collect();
    vs.sort_by_key(|&v| key(v));
    vs
}

/// Covers `y² = h(t)` for primitive squarefree integer `h` of degree 1 or 2,
/// ordered by height, then degree, then coefficients from the top with
/// `0, 1, -1, 2, -2, …` as the digit order.
#[derive(Clone, Debug, Default)]
pub struct CoverGrid {
    grid: Vec<RatPoly>,
    height: i64,
}

impl CoverGrid {
    fn fill_height(&mut self, h: i64) {
        let vs = coeff_range(h);
        for &b in &vs {
            for &c in &vs {
                if b != 0 && b.abs().max(c.abs()) == h && b.gcd(&c) == 1 {
                    self.grid.push(RatPoly::from_ints(&[c, b]));
                }
            }
        }
        for &a in &vs {
            for &b in &vs {
                for &c in &vs {
                    let height = a.abs().max(b.abs()).max(c.abs());
                    if a != 0 && height == h && a.gcd(&b).gcd(&c) == 1 && b * b - 4 * a * c != 0 {
                        self.grid.push(RatPoly::from_ints(&[c, b, a]));
                    }
                }
            }
        }
    }

    /// Grid element `id ≥ 1`.
    pub fn get(&mut self, id: usize) -> RatPoly {
        assert!(id >= 1, "cover ids start at 1");
        while self.grid.len() < id {
            self.height += 1;
            let h = self.height;
            self.fill_height(h);
        }
        self.grid[id - 1].clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpec {
    /// Index in the cover grid.
    pub id: usize,
    /// Position in the list of covers, where every grid element recurs.
    pub position: usize,
    pub h: RatPoly,
}

/// Whether the orbit of 0 under `x² + c` is finite. Hitting 0 makes an
/// iterate inseparable; any other finite orbit leaves the discriminant
/// tower finite.
fn critical_orbit_is_finite(c: &BigInt) -> bool {
    let escape = c.abs() + 1;
    let mut x = BigInt::zero();
    let mut seen = Vec::new();
    for _ in 0..64 {
        x = &x * &x + c;
        if x.is_zero() {
            return true;
        }
        if seen.contains(&x) {
            return true;
        }
        if x.abs() > escape {
            return false;
        }
        seen.push(x.clone());
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VastSpec {
    /// Position in the list of vast specifications.
    pub index: usize,
    pub c: BigInt,
    pub poly: RatPoly,
    /// Start level of the discriminant subextension.
    pub n: usize,
}

/// Every constructed object the engine and the verifier enumerate, with
/// discriminant classes cached per polynomial.
#[derive(Clone, Debug, Default)]
pub struct Enumerations {
    covers: CoverGrid,
    c_grid: Vec<BigInt>,
    c_next: i64,
    classes: BTreeMap<BigInt, DiscClasses>,
}

impl Enumerations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cover(&mut self, position: usize) -> CoverSpec {
        let (id, _) = diagonal(position);
        CoverSpec { id, position, h: self.covers.get(id) }
    }

    pub fn cover_grid(&mut self, id: usize) -> RatPoly {
        self.covers.get(id)
    }

    fn c_value(&mut self, i: usize) -> BigInt {
        while self.c_grid.len() < i {
            self.c_next += 1;
            for c in [self.c_next, -self.c_next] {
                let c = BigInt::from(c);
                if !critical_orbit_is_finite(&c) {
                    self.c_grid.push(c);
                }
            }
        }
        self.c_grid[i - 1].clone()
    }

    /// Vast specification at position `index ≥ 1`: the pair
    /// `(n, i) = diagonal(index)` names `x² + c_i` from level `n`.
    pub fn vast(&mut self, index: usize) -> VastSpec {
        let (n, i) = diagonal(index);
        let c = self.c_value(i);
        VastSpec { index, poly: RatPoly::quadratic_family(&c), c, n }
    }

    /// Class of `disc(f^level)` for the polynomial of `spec`.
    pub fn level_class(&mut self, spec: &VastSpec, level: usize) -> Result<SquareClass, ClassError> {
        if !self.classes.contains_key(&spec.c) {
            self.classes.insert(spec.c.clone(), DiscClasses::new(&spec.poly)?);
        }
        self.classes.get_mut(&spec.c).expect("inserted").class(level)
    }

    /// Element `i` (0-based) of the stream of `spec`, at level `n + i`.
    pub fn stream_class(&mut self, spec: &VastSpec, i: usize) -> Result<SquareClass, ClassError> {
        self.level_class(spec, spec.n + i)
    }

    /// Span of the first `depth` stream elements.
    pub fn truncated(&mut self, spec: &VastSpec, depth: usize) -> Result<ClassSubspace, ClassError> {
        let classes = (0..depth).map(|i| self.stream_class(spec, i)).collect::<Result<Vec<_>, _>>()?;
        Ok(ClassSubspace::span(&classes))
    }
}

/// The default covers and vast specifications.
pub fn default_enumerations() -> Enumerations {
    Enumerations::new()
}

/// `max(|p|, q)` for `p/q` in lowest terms.
pub fn height(q: &BigRational) -> BigInt {
    q.numer().abs().max(q.denom().clone())
}

/// Rationals of height at most `bound`: by height, then denominator, then
/// absolute numerator, positive before negative.
pub fn rationals_by_height(bound: u64) -> impl Iterator<Item = BigRational> {
    (1..=bound as i64).flat_map(|h| {
        let mut level = Vec::new();
        for q in 1..=h {
            let nums: Vec<i64> = if q < h { vec![h] } else { (0..=h).collect() };
            for p in nums {
                if p.gcd(&q) != 1 {
                    continue;
                }
                level.push(BigRational::new(p.into(), q.into()));
                if p != 0 {
                    level.push(BigRational::new((-p).into(), q.into()));
                }
            }
        }
        level
    })
}
