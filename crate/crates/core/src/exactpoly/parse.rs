use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::RatPoly;

/// Polynomial text error, with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, message: message.into() })
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit run parses"))
    }

    fn exponent(&mut self) -> Result<usize, ParseError> {
        let at = self.pos;
        let e = self.integer()?;
        usize::try_from(e).map_err(|_| ParseError { position: at, message: "exponent too large".into() })
    }

    /// One monomial `c`, `c*x^k`, `cx^k` or `x^k` (sign handled by the caller).
    fn term(&mut self) -> Result<(BigRational, usize), ParseError> {
        let mut coeff = BigRational::one();
        let mut saw_coeff = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = self.integer()?;
            let den = if self.eat(b'/') {
                let at = self.pos;
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(ParseError { position: at, message: "zero denominator".into() });
                }
                d
            } else {
                BigInt::one()
            };
            coeff = BigRational::new(num, den);
            saw_coeff = true;
            if self.eat(b'*') && self.peek() != Some(b'x') {
                return self.err("expected 'x' after '*'");
            }
        }
        if self.eat(b'x') {
            let power = if self.eat(b'^') { self.exponent()? } else { 1 };
            return Ok((coeff, power));
        }
        if !saw_coeff {
            return self.err("expected a coefficient or 'x'");
        }
        Ok((coeff, 0))
    }
}

pub(super) fn parse_poly(s: &str) -> Result<RatPoly, ParseError> {
    let mut sc = Scanner { src: s.as_bytes(), pos: 0 };
    let mut coeffs: Vec<BigRational> = Vec::new();
    let mut negative = if sc.eat(b'-') {
        true
    } else {
        sc.eat(b'+');
        false
    };
    loop {
        let (c, k) = sc.term()?;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, BigRational::zero());
        }
        if negative {
            coeffs[k] -= c;
        } else {
            coeffs[k] += c;
        }
        match sc.peek() {
            None => break,
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            Some(_) => return sc.err("expected '+', '-' or end of input"),
        }
        sc.pos += 1;
    }
    Ok(RatPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_grammar_examples() {
        let f = parse_poly("x^2 - 3").unwrap();
        assert_eq!(f, RatPoly::from_ints(&[-3, 0, 1]));
        let g = parse_poly("1/2*x^3 + x - 7").unwrap();
        assert_eq!(g.coeff(3), BigRational::new(1.into(), 2.into()));
        assert_eq!(g.coeff(1), BigRational::one());
        assert_eq!(g.coeff(0), BigRational::from_integer((-7).into()));
        assert_eq!(parse_poly("  x^2+x^2 ").unwrap(), RatPoly::from_ints(&[0, 0, 2]));
        assert_eq!(parse_poly("3x").unwrap(), RatPoly::from_ints(&[0, 3]));
        assert_eq!(parse_poly("-x").unwrap(), RatPoly::from_ints(&[0, -1]));
        assert_eq!(parse_poly("x - x").unwrap(), RatPoly::zero());
    }

    #[test]
    fn rejects_with_positions() {
        let e = parse_poly("x^^2").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_poly("x^2 + ").unwrap_err();
        assert_eq!(e.position, 6);
        let e = parse_poly("").unwrap_err();
        assert_eq!(e.position, 0);
        let e = parse_poly("2/0*x").unwrap_err();
        assert_eq!(e.message, "zero denominator");
        assert!(parse_poly("y^2").is_err());
        assert!(parse_poly("x^2 3").is_err());
        assert!(parse_poly("2*").is_err());
    }
}
