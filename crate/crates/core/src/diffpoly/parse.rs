//! Text form of graded polynomials.
//!
//! ```text
//! document  := directive* expr
//! directive := ("odd" | "param") ":" ident ("," ident)* ";"
//! expr      := ["+" | "-"] term (("+" | "-") term)*
//! term      := factor ("*" factor)*
//! factor    := atom ["^" power]
//! atom      := int ["/" int] | ident [suffix] | "(" expr ")"
//! suffix    := "_" "t"* ("x"{1..} | int "x")
//! power     := ["-"] int ["/" int] | param | "(" expr ")"
//! ```
//!
//! Identifiers are even unless declared `odd`; declared `param` identifiers
//! are scalars in the coefficient ring.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::coeff::{Coeff, Exponent, Q};
use super::poly::{Generator, GradedPoly};
use crate::error::{Error, Result};

/// Symbol declarations in effect while parsing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub odd: BTreeSet<String>,
    pub params: BTreeSet<String>,
}

impl Declarations {
    pub fn new<'a>(odd: impl IntoIterator<Item = &'a str>, params: impl IntoIterator<Item = &'a str>) -> Self {
        Declarations {
            odd: odd.into_iter().map(str::to_string).collect(),
            params: params.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn header(&self) -> String {
        let mut s = String::new();
        if !self.odd.is_empty() {
            s.push_str(&format!("odd: {};", self.odd.iter().cloned().collect::<Vec<_>>().join(", ")));
        }
        if !self.params.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&format!("param: {};", self.params.iter().cloned().collect::<Vec<_>>().join(", ")));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident { name: String, t: u32, x: u32, suffixed: bool },
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((start, t));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().map_err(|_| perr(start, "bad integer"))?;
            out.push((start, Tok::Int(n)));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name = text[start..i].to_string();
            let (mut t, mut x, mut suffixed) = (0u32, 0u32, false);
            if i < bytes.len() && bytes[i] == b'_' {
                suffixed = true;
                i += 1;
                while i < bytes.len() && bytes[i] == b't' {
                    t += 1;
                    i += 1;
                }
                if i < bytes.len() && bytes[i].is_ascii_digit() {
                    let ds = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i >= bytes.len() || bytes[i] != b'x' {
                        return Err(perr(ds, "expected `x` after derivative count"));
                    }
                    x = text[ds..i].parse().map_err(|_| perr(ds, "derivative count too large"))?;
                    i += 1;
                } else {
                    while i < bytes.len() && bytes[i] == b'x' {
                        x += 1;
                        i += 1;
                    }
                }
                if t == 0 && x == 0 {
                    return Err(perr(start, "empty derivative suffix"));
                }
                if i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    return Err(perr(i, "unexpected character in derivative suffix"));
                }
            }
            out.push((start, Tok::Ident { name, t, x, suffixed }));
            continue;
        }
        return Err(perr(start, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    decls: &'a Declarations,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(perr(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<GradedPoly> {
        let mut acc = GradedPoly::zero();
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                negate = true;
            }
            Some(Tok::Plus) => {
                self.bump();
            }
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    negate = false;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    negate = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GradedPoly> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn int_literal(&mut self) -> Result<Q> {
        let at = self.offset();
        let n = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => return Err(perr(at, "expected integer")),
        };
        if let (Some(Tok::Slash), Some(Tok::Int(_))) = (self.peek(), self.peek_at(1)) {
            self.bump();
            let dat = self.offset();
            let Some(Tok::Int(d)) = self.bump() else { unreachable!() };
            if d.is_zero() {
                return Err(perr(dat, "zero denominator"));
            }
            return Ok(Q::new(n, d));
        }
        Ok(Q::from_integer(n))
    }

    fn factor(&mut self) -> Result<GradedPoly> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(_)) => {
                let v = self.int_literal()?;
                if let Some(Tok::Caret) = self.peek() {
                    self.bump();
                    let n = self.small_int_power()?;
                    return Ok(GradedPoly::rational(num_traits::pow(v, n as usize)));
                }
                Ok(GradedPoly::rational(v))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                if let Some(Tok::Caret) = self.peek() {
                    self.bump();
                    let n = self.small_int_power()?;
                    return Ok(inner.pow(n));
                }
                Ok(inner)
            }
            Some(Tok::Ident { name, t, x, suffixed }) => {
                self.bump();
                if self.decls.params.contains(&name) {
                    if suffixed {
                        return Err(perr(at, format!("parameter `{name}` cannot carry a derivative suffix")));
                    }
                    let p = GradedPoly::param(&name);
                    if let Some(Tok::Caret) = self.peek() {
                        self.bump();
                        let n = self.small_int_power()?;
                        return Ok(p.pow(n));
                    }
                    return Ok(p);
                }
                let g = Generator {
                    field: name.as_str().into(),
                    t_order: t,
                    x_order: x,
                    odd: self.decls.odd.contains(&name),
                };
                let e = if let Some(Tok::Caret) = self.peek() {
                    self.bump();
                    self.exponent()?
                } else {
                    Exponent::int(1)
                };
                GradedPoly::power_of(g, e).map_err(|err| perr(at, err.to_string()))
            }
            Some(_) => Err(perr(at, "expected a number, symbol or `(`")),
            None => Err(perr(at, "unexpected end of input")),
        }
    }

    fn small_int_power(&mut self) -> Result<u32> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => n.to_u32().ok_or_else(|| perr(at, "power too large")),
            _ => Err(perr(at, "expected a non-negative integer power")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.bump();
                let v = self.int_literal()?;
                Ok(Exponent::rational(-v))
            }
            Some(Tok::Int(_)) => Ok(Exponent::rational(self.int_literal()?)),
            Some(Tok::Ident { name, suffixed: false, .. }) if self.decls.params.contains(&name) => {
                self.bump();
                Ok(Exponent::param(&name))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                inner
                    .as_scalar()
                    .as_ref()
                    .and_then(Coeff::to_exponent)
                    .ok_or_else(|| perr(at, "exponent must be affine in declared parameters"))
            }
            _ => Err(perr(at, "expected an exponent")),
        }
    }
}

/// Parses a document, honouring its `odd:`/`param:` header directives.
pub fn parse(text: &str) -> Result<GradedPoly> {
    parse_with(text, &Declarations::default())
}

/// Parses with pre-declared symbols; header directives add to them.
pub fn parse_with(text: &str, decls: &Declarations) -> Result<GradedPoly> {
    let toks = lex(text)?;
    let mut merged = decls.clone();
    let mut pos = 0;
    loop {
        let kind = match (toks.get(pos), toks.get(pos + 1)) {
            (Some((_, Tok::Ident { name, suffixed: false, .. })), Some((_, Tok::Colon)))
                if name == "odd" || name == "param" =>
            {
                name.clone()
            }
            _ => break,
        };
        pos += 2;
        loop {
            match toks.get(pos) {
                Some((_, Tok::Ident { name, suffixed: false, .. })) => {
                    if kind == "odd" {
                        merged.odd.insert(name.clone());
                    } else {
                        merged.params.insert(name.clone());
                    }
                    pos += 1;
                }
                Some((p, _)) => return Err(perr(*p, "expected a symbol name in directive")),
                None => return Err(perr(text.len(), "unterminated directive")),
            }
            match toks.get(pos) {
                Some((_, Tok::Comma)) => pos += 1,
                Some((_, Tok::Semi)) => {
                    pos += 1;
                    break;
                }
                Some((p, _)) => return Err(perr(*p, "expected `,` or `;`")),
                None => return Err(perr(text.len(), "unterminated directive")),
            }
        }
    }
    let mut p = Parser { toks, pos, end: text.len(), decls: &merged };
    if p.peek().is_none() {
        return Err(perr(text.len(), "empty expression"));
    }
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(perr(p.offset(), "unexpected trailing input"));
    }
    Ok(out)
}

/// Parses `name=value` rational parameter assignments such as `beta=1/2`.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t),
    };
    let v = match body.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| Error::arg(format!("bad rational `{text}`")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::arg(format!("bad rational `{text}`")))?;
            if d.is_zero() {
                return Err(Error::arg(format!("zero denominator in `{text}`")));
            }
            Q::new(n, d)
        }
        None => Q::from_integer(body.parse().map_err(|_| Error::arg(format!("bad rational `{text}`")))?),
    };
    Ok(if neg { -v } else { v })
}

pub fn parse_params(text: &str) -> Result<BTreeMap<String, Q>> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::arg(format!("expected name=value, got `{item}`")))?;
        out.insert(k.trim().to_string(), parse_rational(v)?);
    }
    Ok(out)
}
