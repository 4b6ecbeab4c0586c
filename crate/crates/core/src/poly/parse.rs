//! Text syntax: `x1^2*x2 - 3/2*x2 + (x1 + x2)^2`.

use super::{parse_rational, Polynomial};
use crate::Error;

/// Parses a polynomial in the variables `x1..xn`.
pub fn parse_polynomial(src: &str, nvars: usize) -> Result<Polynomial, Error> {
    let mut p = Parser { s: src.as_bytes(), i: 0, nvars, src };
    let e = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    nvars: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.i, self.src))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.i += 1;
                    acc = acc + self.term()?;
                }
                b'-' => {
                    self.i += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.i += 1;
                    acc = acc * self.unary()?;
                }
                b'/' => {
                    self.i += 1;
                    let d = self.unary()?;
                    if d.degree() != 0 || d.is_zero() {
                        return Err(self.err("division by a non-constant or zero"));
                    }
                    let c = d.coeff(&super::Monomial::one(self.nvars));
                    acc = acc.scale(&(num_rational::BigRational::from_integer(1.into()) / c));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, Error> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, Error> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.ws();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let k: u32 = self.src[start..self.i].parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, Error> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.i += 1;
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let idx: usize = self.src[start..self.i].parse().map_err(|_| self.err("expected variable index"))?;
                if idx == 0 || idx > self.nvars {
                    return Err(self.err(&format!("variable x{idx} outside x1..x{}", self.nvars)));
                }
                Ok(Polynomial::var(self.nvars, idx - 1))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                // Scientific exponent only when a digit follows.
                if self.i < self.s.len() && (self.s[self.i] == b'e' || self.s[self.i] == b'E') {
                    let mut j = self.i + 1;
                    if j < self.s.len() && (self.s[j] == b'+' || self.s[j] == b'-') {
                        j += 1;
                    }
                    if j < self.s.len() && self.s[j].is_ascii_digit() {
                        while j < self.s.len() && self.s[j].is_ascii_digit() {
                            j += 1;
                        }
                        self.i = j;
                    }
                }
                let c = parse_rational(&self.src[start..self.i])?;
                Ok(Polynomial::constant(self.nvars, c))
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}
