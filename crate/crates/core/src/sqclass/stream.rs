use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{ClassError, SquareClass};
use crate::exactpoly::{IterateDiscriminants, RatPoly};
use crate::factor::next_prime_u64;

/// Square classes of `disc(f^m)` for `m = 1, 2, …`, read off the factored
/// recursion so that only the new factor of each level is ever factored.
#[derive(Clone, Debug)]
pub struct DiscClasses {
    discs: IterateDiscriminants,
    classes: Vec<SquareClass>,
}

impl DiscClasses {
    pub fn new(f: &RatPoly) -> Result<Self, ClassError> {
        Ok(Self { discs: IterateDiscriminants::new(f)?, classes: Vec::new() })
    }

    pub fn poly(&self) -> &RatPoly {
        self.discs.poly()
    }

    pub fn discriminants(&mut self) -> &mut IterateDiscriminants {
        &mut self.discs
    }

    /// Class of `disc(f^m)`, `m ≥ 1`.
    pub fn class(&mut self, m: usize) -> Result<SquareClass, ClassError> {
        assert!(m >= 1, "levels start at 1");
        while self.classes.len() < m {
            let level = self.classes.len() + 1;
            let lf = self.discs.level(level)?.clone();
            if lf.vanishes() {
                return Err(ClassError::Inseparable(level));
            }
            let mut c = if lf.negative { SquareClass::coordinate(BigInt::from(-1)) } else { SquareClass::trivial() };
            if lf.previous_exponent % 2 == 1 {
                if let Some(prev) = self.classes.last() {
                    c = c.mul(prev);
                }
            }
            for (base, exp) in &lf.powers {
                if exp.is_odd() {
                    c = c.mul(&SquareClass::of_rational(base)?);
                }
            }
            self.classes.push(c);
        }
        Ok(self.classes[m - 1].clone())
    }

    pub fn classes_to(&mut self, n: usize) -> Result<Vec<SquareClass>, ClassError> {
        (1..=n).map(|m| self.class(m)).collect()
    }
}

/// Named stream definitions: `primes`, `disc:<poly>:n>=<k>` (or `n≥<k>`),
/// and `list:<k1>,<k2>,…`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamSpec {
    Primes,
    Disc { poly: RatPoly, start: usize },
    List(Vec<BigInt>),
}

impl StreamSpec {
    pub fn open(&self) -> Result<ClassStream, ClassError> {
        let source = match self {
            StreamSpec::Primes => Source::Primes { last: 1 },
            StreamSpec::Disc { poly, start } => {
                if *start == 0 {
                    return Err(ClassError::UnknownStream(self.to_string()));
                }
                Source::Disc { classes: Box::new(DiscClasses::new(poly)?), start: *start }
            }
            StreamSpec::List(ks) => {
                let classes = ks.iter().map(SquareClass::of_integer).collect::<Result<_, _>>()?;
                Source::List(classes)
            }
        };
        Ok(ClassStream { spec: self.clone(), source, cache: Vec::new() })
    }
}

impl fmt::Display for StreamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamSpec::Primes => f.write_str("primes"),
            StreamSpec::Disc { poly, start } => write!(f, "disc:{poly}:n>={start}"),
            StreamSpec::List(ks) => {
                let parts: Vec<String> = ks.iter().map(BigInt::to_string).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for StreamSpec {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ClassError::UnknownStream(s.to_string());
        let s = s.trim();
        if s == "primes" {
            return Ok(StreamSpec::Primes);
        }
        if let Some(rest) = s.strip_prefix("list:") {
            let ks = rest
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<BigInt>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            if ks.iter().any(Zero::is_zero) {
                return Err(bad());
            }
            return Ok(StreamSpec::List(ks));
        }
        let rest = s.strip_prefix("disc:").ok_or_else(bad)?;
        let (poly, bound) = rest.rsplit_once(':').ok_or_else(bad)?;
        let bound = bound.trim();
        let start = bound
            .strip_prefix("n>=")
            .or_else(|| bound.strip_prefix("n≥"))
            .ok_or_else(bad)?
            .trim()
            .parse::<usize>()
            .map_err(|_| bad())?;
        if start == 0 {
            return Err(bad());
        }
        let poly: RatPoly = poly.parse().map_err(|e| ClassError::Poly(crate::exactpoly::PolyError::Parse(e)))?;
        Ok(StreamSpec::Disc { poly, start })
    }
}

#[derive(Clone, Debug)]
enum Source {
    Primes { last: u64 },
    Disc { classes: Box<DiscClasses>, start: usize },
    List(Vec<SquareClass>),
}

/// Reproducible, lazily extended sequence of square classes.
#[derive(Clone, Debug)]
pub struct ClassStream {
    spec: StreamSpec,
    source: Source,
    cache: Vec<SquareClass>,
}

impl ClassStream {
    pub fn primes() -> Self {
        StreamSpec::Primes.open().expect("prime stream always opens")
    }

    pub fn disc(poly: &RatPoly, start: usize) -> Result<Self, ClassError> {
        StreamSpec::Disc { poly: poly.clone(), start }.open()
    }

    pub fn spec(&self) -> &StreamSpec {
        &self.spec
    }

    /// Element `i` (0-based).
    pub fn get(&mut self, i: usize) -> Result<SquareClass, ClassError> {
        while self.cache.len() <= i {
            let next = match &mut self.source {
                Source::Primes { last } => {
                    *last = next_prime_u64(*last);
                    SquareClass::coordinate(BigInt::from(*last))
                }
                Source::Disc { classes, start } => classes.class(*start + self.cache.len())?,
                Source::List(list) => match list.get(self.cache.len()) {
                    Some(c) => c.clone(),
                    None => return Err(ClassError::DepthExhausted { depth: list.len() }),
                },
            };
            self.cache.push(next);
        }
        Ok(self.cache[i].clone())
    }

    pub fn prefix(&mut self, len: usize) -> Result<Vec<SquareClass>, ClassError> {
        (0..len).map(|i| self.get(i)).collect()
    }
}
