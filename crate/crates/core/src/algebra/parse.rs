//! Recursive-descent parser for the operator grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := [rational '*'] mono
//! mono   := 'd^(' int (',' int)* ')' | factor ('*' factor)*
//! factor := 'd' index ['^' int]
//! ```
//!
//! Rationals are `p`, `p/q` or decimals such as `0.125` (converted exactly).
//! A leading sign on the first term is accepted. Whitespace is ignored
//! between tokens.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{DifferentialOperator, MultiIndex};
use crate::{Error, Rational, Result};

/// Largest exponent accepted in a single factor or tuple entry.
pub const MAX_EXPONENT: u32 = 32;

/// Parses one operator expression in `dim` variables.
pub fn parse_operator(text: &str, dim: usize) -> Result<DifferentialOperator> {
    if dim == 0 {
        return Err(Error::Config("dimension must be at least 1".to_string()));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    let terms = p.expr()?;
    DifferentialOperator::from_terms(dim, "", terms)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn syntax<T>(&self, message: impl Into<alloc::string::String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.syntax(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Vec<(MultiIndex, Rational)>> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(b'-') {
            -Rational::one()
        } else {
            self.eat(b'+');
            Rational::one()
        };
        loop {
            let (alpha, c) = self.term()?;
            terms.push((alpha, sign * c));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = Rational::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -Rational::one();
                }
                Some(c) => return self.syntax(format!("unexpected '{}'", c as char)),
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(MultiIndex, Rational)> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let q = self.rational()?;
                self.expect(b'*')?;
                q
            }
            Some(b'd') => Rational::one(),
            Some(c) => return self.syntax(format!("expected a term, found '{}'", c as char)),
            None => return self.syntax("expected a term, found end of input"),
        };
        Ok((self.mono()?, coeff))
    }

    fn mono(&mut self) -> Result<MultiIndex> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"d^") {
            self.pos += 2;
            self.expect(b'(')?;
            let start = self.pos;
            let mut entries = Vec::new();
            loop {
                let at = self.pos_after_ws();
                let v = self.int()?;
                entries.push(self.exponent(v, at, 0)?);
                if self.eat(b')') {
                    break;
                }
                self.expect(b',')?;
            }
            if entries.len() != self.dim {
                self.pos = start;
                return Err(Error::DimensionMismatch { expected: self.dim, found: entries.len() });
            }
            return Ok(MultiIndex::new(entries));
        }
        let mut entries = alloc::vec![0u32; self.dim];
        loop {
            self.factor(&mut entries)?;
            // a '*' after a factor continues the monomial
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(MultiIndex::new(entries))
    }

    fn factor(&mut self, entries: &mut [u32]) -> Result<()> {
        self.expect(b'd')?;
        let at = self.pos;
        let index = match self.src.get(self.pos) {
            Some(c) if c.is_ascii_digit() => self.int()?,
            _ => return self.syntax("expected a derivative index after 'd'"),
        };
        if index == 0 || index > self.dim as u64 {
            return Err(Error::IndexOutOfRange { position: at, index, dim: self.dim });
        }
        let mut exp = 1;
        if self.eat(b'^') {
            let at = self.pos_after_ws();
            let v = self.int()?;
            exp = self.exponent(v, at, 1)?;
        }
        let slot = &mut entries[index as usize - 1];
        *slot += exp;
        if *slot > MAX_EXPONENT {
            return Err(Error::ExponentOutOfRange {
                position: at,
                exponent: *slot as u64,
                min: 1,
                max: MAX_EXPONENT,
            });
        }
        Ok(())
    }

    fn pos_after_ws(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn exponent(&self, v: u64, position: usize, min: u32) -> Result<u32> {
        if v < min as u64 || v > MAX_EXPONENT as u64 {
            return Err(Error::ExponentOutOfRange { position, exponent: v, min, max: MAX_EXPONENT });
        }
        Ok(v as u32)
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let d = self.digits();
        if d.is_empty() {
            return self.syntax("expected an integer");
        }
        core::str::from_utf8(d)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(Error::Syntax { position: start, message: "integer too large".to_string() })
    }

    fn big(&self, d: &[u8], at: usize) -> Result<BigInt> {
        BigInt::parse_bytes(d, 10)
            .ok_or(Error::Syntax { position: at, message: "malformed number".to_string() })
    }

    fn rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        let int_part = self.digits().to_vec();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac = self.digits().to_vec();
            if int_part.is_empty() && frac.is_empty() {
                self.pos = start;
                return self.syntax("malformed decimal");
            }
            let mut all = int_part;
            all.extend_from_slice(&frac);
            if all.is_empty() {
                all.push(b'0');
            }
            let numer = self.big(&all, start)?;
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational::new(numer, denom));
        }
        let numer = self.big(&int_part, start)?;
        if self.eat(b'/') {
            let at = self.pos_after_ws();
            let d = self.digits().to_vec();
            if d.is_empty() {
                return self.syntax("expected a denominator");
            }
            let denom = self.big(&d, at)?;
            if denom.is_zero() {
                return Err(Error::Syntax { position: at, message: "zero denominator".to_string() });
            }
            return Ok(Rational::new(numer, denom));
        }
        Ok(Rational::from_integer(numer))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn mi<const N: usize>(a: [u32; N]) -> MultiIndex {
        MultiIndex::from(a)
    }

    #[test]
    fn tuple_form() {
        let op = parse_operator("d^(2,0,1) - d^(0,3,1)", 3).unwrap();
        assert_eq!(op.terms().len(), 2);
        assert_eq!(op.coefficient(&mi([2, 0, 1])), q(1, 1));
        assert_eq!(op.coefficient(&mi([0, 3, 1])), q(-1, 1));
    }

    #[test]
    fn factor_form() {
        let op = parse_operator("d1", 2).unwrap();
        assert_eq!(op.coefficient(&mi([1, 0])), q(1, 1));
        let op = parse_operator("2*d1^2*d2 + d2^3", 2).unwrap();
        assert_eq!(op.coefficient(&mi([2, 1])), q(2, 1));
        assert_eq!(op.coefficient(&mi([0, 3])), q(1, 1));
        assert_eq!(op.terms().len(), 2);
    }

    #[test]
    fn rationals_are_exact() {
        let op = parse_operator("0.125*d1 + 3/4*d2 - .5*d1", 2).unwrap();
        assert_eq!(op.coefficient(&mi([1, 0])), q(-3, 8));
        assert_eq!(op.coefficient(&mi([0, 1])), q(3, 4));
        let op = parse_operator("-d1*d1 + d1^2 + d2", 2).unwrap();
        assert_eq!(op.terms().len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_operator("d1 + * d2", 2) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_operator("d3", 2),
            Err(Error::IndexOutOfRange { index: 3, position: 1, .. })
        ));
        assert!(matches!(parse_operator("d0", 2), Err(Error::IndexOutOfRange { index: 0, .. })));
        assert!(matches!(
            parse_operator("d1^40", 2),
            Err(Error::ExponentOutOfRange { exponent: 40, .. })
        ));
        assert!(matches!(
            parse_operator("d^(1,2)", 3),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert_eq!(parse_operator("d1 - d1", 1), Err(Error::EmptyOperator));
        assert!(matches!(parse_operator("", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_operator("1/0*d1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_operator("d1 d2", 2), Err(Error::Syntax { .. })));
    }
}
