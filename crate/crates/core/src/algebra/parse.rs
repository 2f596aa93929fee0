use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;

use super::poly::SuperPolynomial;
use super::variables::VariableTable;
use crate::error::{Error, Result};
use crate::Rational;

/// Parses the text grammar produced by `Display`, plus parentheses, powers of
/// parenthesised groups, and implicit coefficient one:
///
/// ```text
/// expr   := ['-'] term (('+' | '-') term)*
/// term   := factor ('*' factor)*
/// factor := number ['/' number] | ident ['^' int] | '(' expr ')' ['^' int]
/// ```
///
/// Factors multiply in the order written, so odd variables pick up their
/// reordering sign.
pub fn parse_polynomial(table: &Arc<VariableTable>, text: &str) -> Result<SuperPolynomial> {
    let mut p = Parser { table, chars: text.chars().collect(), pos: 0 };
    p.skip_ws();
    if p.pos == p.chars.len() {
        return Err(p.error("empty expression"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error(&format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(out)
}

struct Parser<'a> {
    table: &'a Arc<VariableTable>,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<SuperPolynomial> {
        let mut negate = false;
        if self.peek() == Some('-') {
            self.pos += 1;
            negate = true;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SuperPolynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        BigInt::from_str(&s).ok()
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let e = self.integer().ok_or_else(|| self.error("expected exponent"))?;
        u32::try_from(e).map_err(|_| self.error("exponent too large"))
    }

    fn factor(&mut self) -> Result<SuperPolynomial> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end of input"))?;
        if c.is_ascii_digit() {
            let num = self.integer().unwrap();
            let mut den = BigInt::from(1);
            if self.peek() == Some('/') {
                self.pos += 1;
                self.skip_ws();
                den = self.integer().ok_or_else(|| self.error("expected denominator"))?;
                if den == BigInt::from(0) {
                    return Err(self.error("zero denominator"));
                }
            }
            return Ok(SuperPolynomial::constant(self.table, Rational::new(num, den)));
        }
        if c == '(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(')') {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(inner.pow(e));
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while self.pos < self.chars.len()
                && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
            {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().collect();
            let v = self
                .table
                .lookup(&name)
                .ok_or(Error::UnknownVariable { name, column: start + 1 })?;
            let e = self.exponent()?;
            return Ok(SuperPolynomial::var(self.table, v).pow(e));
        }
        Err(self.error(&format!("unexpected `{c}`")))
    }
}
