//! Recursive-descent parser for the scalar text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! atom   := integer | 'q' | 'v' | '(' expr ')'
//! exponent := integer | '-' integer | '(' '-'? integer ('/' integer)? ')'
//! ```
//! Fractional exponents are only allowed on `q`; `v` stands for `q^(1/d)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Scalar, ScalarError};

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    d: u32,
}

pub(super) fn parse(src: &str, d: u32) -> Result<Scalar, ScalarError> {
    let mut p = Parser { src, bytes: src.as_bytes(), pos: 0, d };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v.with_d(d))
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> ScalarError {
        ScalarError::Parse { input: self.src.to_string(), reason: format!("{reason} at byte {}", self.pos) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.try_mul(&self.unary()?)?;
            } else if self.eat(b'/') {
                acc = acc.try_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        self.src[start..self.pos].parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn small_integer(&mut self) -> Result<i64, ScalarError> {
        let n = self.integer()?;
        i64::try_from(n).map_err(|_| self.err("exponent too large"))
    }

    /// Returns the exponent as a fraction `(num, den)`.
    fn exponent(&mut self) -> Result<(i64, i64), ScalarError> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let mut num = self.small_integer()?;
            if neg {
                num = -num;
            }
            let den = if self.eat(b'/') { self.small_integer()? } else { 1 };
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            if den == 0 {
                return Err(self.err("zero denominator in exponent"));
            }
            return Ok((num, den));
        }
        let neg = self.eat(b'-');
        let n = self.small_integer()?;
        Ok((if neg { -n } else { n }, 1))
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'q') | Some(b'v') => {
                let is_q = self.bytes[self.pos] == b'q';
                self.pos += 1;
                let (num, den) = if self.eat(b'^') { self.exponent()? } else { (1, 1) };
                if is_q {
                    Scalar::q_pow_frac(num, den, self.d).map_err(|_| self.err("exponent not in (1/d)Z"))
                } else if den == 1 {
                    Ok(Scalar::v_pow(num, self.d))
                } else {
                    Err(self.err("fractional power of v"))
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                if self.eat(b'^') {
                    let (num, den) = self.exponent()?;
                    if den != 1 {
                        return Err(self.err("fractional power of a compound expression"));
                    }
                    let e = i32::try_from(num).map_err(|_| self.err("exponent too large"))?;
                    return inner.pow(e);
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let base = Scalar::from_rational(BigRational::new(n, BigInt::one()));
                if self.eat(b'^') {
                    let (num, den) = self.exponent()?;
                    if den != 1 {
                        return Err(self.err("fractional power of an integer"));
                    }
                    let e = i32::try_from(num).map_err(|_| self.err("exponent too large"))?;
                    return base.pow(e);
                }
                Ok(base)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}
