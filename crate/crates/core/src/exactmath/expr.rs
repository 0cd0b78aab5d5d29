//! Parser for field elements written as polynomials in `l`, e.g. `3 - l`,
//! `1/5`, `2/3*l^2 + l - 7`.

use num_bigint::BigInt;

use super::field::{FieldElement, FieldRef};
use super::poly::{rat, Polynomial, Rational};
use crate::error::{Error, Result};

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn err(&self, msg: &str) -> Error {
        Error::Expr(format!("{msg} at position {}", self.pos))
    }
}

/// Parses an expression into a polynomial in `l`.
pub fn parse_poly_expr(text: &str) -> Result<Polynomial> {
    let mut lx = Lexer {
        s: text.as_bytes(),
        pos: 0,
    };
    let mut acc = Polynomial::zero();
    let mut first = true;
    loop {
        let sign = if lx.eat(b'-') {
            -1
        } else if lx.eat(b'+') || first {
            1
        } else if lx.peek().is_none() {
            break;
        } else {
            return Err(lx.err("expected '+' or '-'"));
        };
        first = false;
        let term = parse_term(&mut lx)?;
        acc = &acc + &term.scale(&rat(sign));
        if lx.peek().is_none() {
            break;
        }
    }
    Ok(acc)
}

fn parse_term(lx: &mut Lexer) -> Result<Polynomial> {
    match lx.peek() {
        Some(b'l') => parse_pow(lx, rat(1)),
        Some(c) if c.is_ascii_digit() => {
            let n = lx.uint()?;
            let mut r = Rational::from_integer(n);
            if lx.eat(b'/') {
                let d = lx.uint()?;
                if d == BigInt::from(0) {
                    return Err(lx.err("zero denominator"));
                }
                r /= Rational::from_integer(d);
            }
            if lx.eat(b'*') {
                if lx.peek() != Some(b'l') {
                    return Err(lx.err("expected 'l' after '*'"));
                }
                parse_pow(lx, r)
            } else {
                Ok(Polynomial::constant(r))
            }
        }
        _ => Err(lx.err("expected a number or 'l'")),
    }
}

fn parse_pow(lx: &mut Lexer, c: Rational) -> Result<Polynomial> {
    lx.eat(b'l');
    let e = if lx.eat(b'^') {
        let n = lx.uint()?;
        usize::try_from(n).map_err(|_| lx.err("exponent too large"))?
    } else {
        1
    };
    if e > 4096 {
        return Err(lx.err("exponent too large"));
    }
    Ok(Polynomial::monomial(c, e))
}

/// Parses an element of `field`, reducing modulo the minimal polynomial.
pub fn parse_element(field: &FieldRef, text: &str) -> Result<FieldElement> {
    let p = parse_poly_expr(text)?;
    Ok(FieldElement::from_poly(field, &p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::poly::rat_frac;

    #[test]
    fn parses_grammar() {
        assert_eq!(
            parse_poly_expr("3 - l").unwrap(),
            Polynomial::from_ints(&[3, -1])
        );
        assert_eq!(
            parse_poly_expr("-2/3*l^2 + l - 7").unwrap(),
            Polynomial::new(vec![rat(-7), rat(1), rat_frac(-2, 3)])
        );
        assert_eq!(
            parse_poly_expr("1/5").unwrap(),
            Polynomial::constant(rat_frac(1, 5))
        );
        assert!(parse_poly_expr("3 l").is_err());
        assert!(parse_poly_expr("").is_err());
        assert!(parse_poly_expr("1/0").is_err());
        assert!(parse_poly_expr("2*").is_err());
    }
}
