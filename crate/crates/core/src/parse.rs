//! Text grammar for polynomials.
//!
//! Terms joined by `+`/`-`; a term is an optional coefficient (decimal real
//! or a parenthesized complex literal like `(1+2i)`) followed by an optional
//! monomial in `x`, `y`, `z` with `^k` powers. Whitespace is ignored. The
//! formatter emits graded-lex order, highest degree first, and round-trips
//! through the parser exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{HPoly, Monomial, Poly};

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            bytes: text.as_bytes(),
            pos: 0,
        }
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

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Unsigned decimal number: digits, optional fraction, optional exponent.
    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // bare 'e' is not an exponent
            }
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|e| Error::Syntax {
            offset: start,
            message: format!("bad number {text:?}: {e}"),
        })
    }

    /// Body of a parenthesized complex literal, after the opening `(`:
    /// `a`, `bi`, `a+bi`, `a-bi`, with optional leading sign and an optional
    /// digitless `i` meaning `1i`.
    fn complex_body(&mut self) -> Result<Complex64> {
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => {
                self.bump();
            }
            Some(b'-') => {
                self.bump();
                sign = -1.0;
            }
            _ => {}
        }
        // Pure imaginary with implicit magnitude: "(i)", "(-i)".
        if self.peek() == Some(b'i') {
            self.bump();
            return Ok(Complex64::new(0.0, sign));
        }
        let first = sign * self.number()?;
        match self.peek() {
            Some(b'i') => {
                self.bump();
                Ok(Complex64::new(0.0, first))
            }
            Some(b'+') | Some(b'-') => {
                let neg = self.bump() == Some(b'-');
                let mag = if self.peek() == Some(b'i') { 1.0 } else { self.number()? };
                if self.bump() != Some(b'i') {
                    return Err(self.err("expected 'i' in complex literal"));
                }
                Ok(Complex64::new(first, if neg { -mag } else { mag }))
            }
            _ => Ok(Complex64::new(first, 0.0)),
        }
    }

    /// Monomial: one or more variable factors with optional `^k`, separated
    /// by optional `*`.
    fn monomial(&mut self) -> Result<Monomial> {
        let mut e = [0u32; 3];
        let mut any = false;
        loop {
            let axis = match self.peek() {
                Some(b'x') => 0,
                Some(b'y') => 1,
                Some(b'z') => 2,
                Some(b'*') if any => {
                    // Lookahead: a '*' may be followed by another variable.
                    let mark = self.pos;
                    self.bump();
                    match self.peek() {
                        Some(b'x') | Some(b'y') | Some(b'z') => continue,
                        _ => {
                            self.pos = mark;
                            break;
                        }
                    }
                }
                _ => break,
            };
            self.bump();
            any = true;
            let mut power = 1u32;
            if self.peek() == Some(b'^') {
                self.bump();
                let n = self.number()?;
                if n.fract() != 0.0 || n < 0.0 || n > u32::MAX as f64 {
                    return Err(self.err("exponent must be a non-negative integer"));
                }
                power = n as u32;
            }
            e[axis] += power;
        }
        if !any {
            return Err(self.err("expected a monomial"));
        }
        Ok(Monomial::new(e[0], e[1], e[2]))
    }

    /// One term: `[coefficient ['*']] monomial` or a bare coefficient.
    fn term(&mut self) -> Result<(Complex64, Option<Monomial>)> {
        let coeff = match self.peek() {
            Some(b'(') => {
                self.bump();
                let c = self.complex_body()?;
                if self.bump() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                Some(c)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => Some(Complex64::new(self.number()?, 0.0)),
            _ => None,
        };
        let explicit_star = coeff.is_some() && self.peek() == Some(b'*');
        if explicit_star {
            self.bump();
        }
        match self.peek() {
            Some(b'x') | Some(b'y') | Some(b'z') => {
                let m = self.monomial()?;
                Ok((coeff.unwrap_or(Complex64::ONE), Some(m)))
            }
            _ => {
                if explicit_star {
                    return Err(self.err("expected a monomial after '*'"));
                }
                match coeff {
                    Some(c) => Ok((c, None)),
                    None => Err(self.err("expected a term")),
                }
            }
        }
    }
}

/// Parse a polynomial expression. Like terms are combined.
///
/// ```
/// let p = multipole::parse_poly("(1+2i)*x*y*z - z^2 + 3").unwrap();
/// assert_eq!(p.degree(), Some(3));
/// assert_eq!(multipole::format_poly(&p), "(1+2i)*x*y*z-z^2+3");
/// ```
pub fn parse_poly(text: &str) -> Result<Poly> {
    let mut sc = Scanner::new(text);
    // degree-indexed accumulation
    let mut parts: Vec<Option<HPoly>> = Vec::new();
    let mut first = true;
    loop {
        let sign = match sc.peek() {
            None if first => return Err(sc.err("empty input")),
            None => break,
            Some(b'+') => {
                sc.bump();
                1.0
            }
            Some(b'-') => {
                sc.bump();
                -1.0
            }
            Some(_) if first => 1.0,
            Some(_) => return Err(sc.err("expected '+' or '-' between terms")),
        };
        first = false;
        let (c, mono) = sc.term()?;
        let c = c * Complex64::new(sign, 0.0);
        let m = mono.unwrap_or(Monomial::new(0, 0, 0));
        let d = m.degree();
        if parts.len() <= d {
            parts.resize(d + 1, None);
        }
        parts[d]
            .get_or_insert_with(|| HPoly::zero(d))
            .add_to_coeff(m, c);
    }
    Ok(Poly::from_parts(parts.into_iter().flatten().collect()))
}

fn format_coeff(c: Complex64, out: &mut String) {
    if c.im == 0.0 {
        out.push_str(&format!("{}", c.re));
    } else {
        out.push('(');
        out.push_str(&format!("{}", c.re));
        if c.im >= 0.0 {
            out.push('+');
        }
        out.push_str(&format!("{}i", c.im));
        out.push(')');
    }
}

fn format_monomial(m: Monomial, out: &mut String) {
    let mut first = true;
    for (sym, e) in [('x', m.x), ('y', m.y), ('z', m.z)] {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push(sym);
        if e > 1 {
            out.push_str(&format!("^{e}"));
        }
    }
}

/// Canonical text form: graded-lex order within each degree, highest degree
/// first. Round-trips exactly through [`parse_poly`].
pub fn format_poly(p: &Poly) -> String {
    let mut out = String::new();
    for h in p.parts().iter().rev() {
        for (m, c) in h.monomials() {
            let is_const = m.degree() == 0;
            if c.im == 0.0 {
                // Real coefficient: fold the sign into the separator.
                let mag = c.re.abs();
                if out.is_empty() {
                    if c.re < 0.0 {
                        out.push('-');
                    }
                } else {
                    out.push(if c.re < 0.0 { '-' } else { '+' });
                }
                if mag != 1.0 || is_const {
                    out.push_str(&format!("{mag}"));
                    if !is_const {
                        out.push('*');
                    }
                }
            } else {
                if !out.is_empty() {
                    out.push('+');
                }
                format_coeff(c, &mut out);
                if !is_const {
                    out.push('*');
                }
            }
            format_monomial(m, &mut out);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
