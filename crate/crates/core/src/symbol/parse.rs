//! Recursive-descent parser for the text form
//!
//! ```text
//! poly   := term ('+' term)*
//! term   := coeff? factor ('*' factor)*
//! factor := 'X' int
//! coeff  := int | int '/' int | decimal
//! ```
//!
//! A `*` between the coefficient and the first factor is accepted, as is a
//! bare coefficient (a constant term, which validation then rejects).

use num_traits::One;

use super::{FreePolynomial, Word};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn poly(&mut self) -> Result<Vec<(Word, Rational)>> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        self.skip_ws();
        if self.pos < self.src.len() {
            return self.error(format!("unexpected {:?}", self.peek().unwrap()));
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Word, Rational)> {
        self.skip_ws();
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => Some(self.coeff()?),
            Some('X') => None,
            Some(c) => return self.error(format!("expected a coefficient or X, found {c:?}")),
            None => return self.error("expected a term, found end of input"),
        };
        self.skip_ws();
        let mut letters = Vec::new();
        if let Some(c) = &coeff {
            let save = self.pos;
            if self.eat('*') {
                self.skip_ws();
                if self.peek() != Some('X') {
                    return self.error("expected X after '*'");
                }
            } else {
                self.pos = save;
            }
            self.skip_ws();
            if self.peek() != Some('X') {
                // bare coefficient: constant term
                return Ok((Word::empty(), c.clone()));
            }
        }
        letters.push(self.factor()?);
        while self.eat('*') {
            self.skip_ws();
            letters.push(self.factor()?);
        }
        Ok((Word::new(letters), coeff.unwrap_or_else(Rational::one)))
    }

    fn factor(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() != Some('X') {
            return self.error("expected a variable X<index>");
        }
        self.pos += 1;
        let digits = self.digits();
        if digits.is_empty() {
            return self.error("expected an index after X");
        }
        let index: usize = digits
            .parse()
            .map_err(|_| Error::Syntax { pos: start, msg: "variable index too large".into() })?;
        if index == 0 {
            return Err(Error::UnknownVariable { index, pos: start });
        }
        Ok(index - 1)
    }

    fn coeff(&mut self) -> Result<Rational> {
        let start = self.pos;
        self.digits();
        if self.peek() == Some('.') {
            self.pos += 1;
            self.digits();
        } else {
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some('/') {
                self.pos += 1;
                self.skip_ws();
                if self.digits().is_empty() {
                    return self.error("expected a denominator after '/'");
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.src[start..self.pos].split_whitespace().collect();
        rational::parse(&text).map_err(|e| Error::Syntax { pos: start, msg: e.to_string() })
    }
}

/// Parses the text form. With `n = None` the alphabet size is the largest
/// index used.
pub fn parse_symbol(text: &str, n: Option<usize>) -> Result<FreePolynomial> {
    let mut p = Parser { src: text, pos: 0 };
    let terms = p.poly()?;
    let used = terms.iter().map(|(w, _)| w.alphabet_bound()).max().unwrap_or(0);
    let n = match n {
        Some(n) => {
            if used > n {
                return Err(Error::IndexOutOfRange { index: used, n });
            }
            n
        }
        None => used.max(1),
    };
    FreePolynomial::new(n, terms)
}
