//! Text grammar for coefficients, factors, pointed types and classes.
//!
//! Coefficients are ordinary infix expressions over integers, `i` and
//! `E(n)`. A factor is such an expression in `x` whose exponents (written
//! `x^k`, `x^(p/q)` or `x^{p/q}`) are positive after simplification. A pointed
//! type is `[(n, factor), ...]` and a class is a formal sum `n<factor> + ...`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::arith::{CycNum, Rat};
use crate::error::{Error, Result};

use super::factor::ExpFactor;
use super::pointed::{IrregularClass, PointedIrregularType};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    X,
    I,
    E,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Lt,
    Gt,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let tok = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().unwrap())));
                continue;
            }
            b'x' => Tok::X,
            b'i' => Tok::I,
            b'E' => Tok::E,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'<' => Tok::Lt,
            b'>' => Tok::Gt,
            _ => {
                let c = text[i..].chars().next().unwrap();
                return Err(Error::Syntax { pos: i, msg: format!("unexpected character {c:?}") });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

/// Finite Laurent–Puiseux polynomial used while evaluating expressions.
#[derive(Clone, Debug, PartialEq)]
struct Poly(BTreeMap<Rat, CycNum>);

impl Poly {
    fn constant(c: CycNum) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Rat::zero(), c);
        }
        Poly(m)
    }

    fn x() -> Poly {
        Poly(BTreeMap::from([(Rat::one(), CycNum::one())]))
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut m = self.0.clone();
        for (e, c) in &other.0 {
            let slot = m.entry(e.clone()).or_default();
            *slot = slot.add(c);
        }
        m.retain(|_, c| !c.is_zero());
        Poly(m)
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(e, c)| (e.clone(), c.neg())).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut acc = Poly(BTreeMap::new());
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                acc = acc.add(&Poly(BTreeMap::from([(e1 + e2, c1.mul(c2))])));
            }
        }
        acc
    }

    fn as_constant(&self) -> Option<CycNum> {
        match self.0.len() {
            0 => Some(CycNum::zero()),
            1 => self.0.get(&Rat::zero()).cloned(),
            _ => None,
        }
    }

    fn as_monomial(&self) -> Option<(&Rat, &CycNum)> {
        (self.0.len() == 1).then(|| self.0.iter().next().unwrap())
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    text_len: usize,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, text_len: text.len(), _text: text })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.text_len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Slash) {
                let at = self.offset();
                self.pos += 1;
                let d = self.unary()?;
                let Some((e, c)) = d.as_monomial() else {
                    return if d.0.is_empty() {
                        Err(Error::DivisionByZero)
                    } else {
                        Err(Error::Syntax { pos: at, msg: "division by a non-monomial".into() })
                    };
                };
                let inv = Poly(BTreeMap::from([(-e.clone(), c.inv()?)]));
                acc = acc.mul(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat(&Tok::Minus) {
            return Ok(self.unary()?.neg());
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            let at = self.offset();
            self.pos += 1;
            let neg = self.eat(&Tok::Minus);
            let e = self.primary()?;
            let Some(e) = e.as_constant().and_then(|c| c.as_rat().cloned()) else {
                return Err(Error::Syntax { pos: at, msg: "exponent must be rational".into() });
            };
            let e = if neg { -e } else { e };
            return self.power(base, e, at);
        }
        Ok(base)
    }

    fn power(&self, base: Poly, e: Rat, at: usize) -> Result<Poly> {
        if let Some((k, c)) = base.as_monomial() {
            if c.is_one() {
                return Ok(Poly(BTreeMap::from([(k * &e, CycNum::one())])));
            }
        }
        if !e.is_integer() {
            return Err(Error::Syntax { pos: at, msg: "fractional power of a non-monomial".into() });
        }
        let n: i64 = e.to_integer().try_into().map_err(|_| Error::Syntax { pos: at, msg: "exponent too large".into() })?;
        if let Some(c) = base.as_constant() {
            return Ok(Poly::constant(c.pow(n)?));
        }
        if let Some((k, c)) = base.as_monomial() {
            return Ok(Poly(BTreeMap::from([(k * Rat::from_integer(n.into()), c.pow(n)?)])));
        }
        if n < 0 {
            return Err(Error::Syntax { pos: at, msg: "negative power of a polynomial".into() });
        }
        let mut acc = Poly::constant(CycNum::one());
        for _ in 0..n {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Poly> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        match tok {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Poly::constant(CycNum::from_rat(Rat::from_integer(n))))
            }
            Tok::X => {
                self.pos += 1;
                Ok(Poly::x())
            }
            Tok::I => {
                self.pos += 1;
                Ok(Poly::constant(CycNum::root_of_unity(4)))
            }
            Tok::E => {
                self.pos += 1;
                self.expect(&Tok::LParen, "'(' after E")?;
                let at = self.offset();
                let Some(Tok::Int(n)) = self.peek().cloned() else {
                    return self.err("expected an integer order in E(n)");
                };
                self.pos += 1;
                let n: u64 = n.try_into().ok().filter(|&n| n >= 1).ok_or(Error::Syntax { pos: at, msg: "E(n) needs n >= 1".into() })?;
                if n > 10_000 {
                    return Err(Error::Syntax { pos: at, msg: "root of unity order too large".into() });
                }
                self.expect(&Tok::RParen, "')'")?;
                Ok(Poly::constant(CycNum::root_of_unity(n)))
            }
            Tok::LParen => {
                self.pos += 1;
                let p = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(p)
            }
            Tok::LBrace => {
                self.pos += 1;
                let p = self.expr()?;
                self.expect(&Tok::RBrace, "'}'")?;
                Ok(p)
            }
            _ => self.err("expected a number, x, i, E(n) or '('"),
        }
    }

    fn factor(&mut self) -> Result<ExpFactor> {
        let p = self.expr()?;
        ExpFactor::from_terms(p.0)
    }

    fn multiplicity(&mut self) -> Result<u32> {
        let at = self.offset();
        let Some(Tok::Int(n)) = self.peek().cloned() else {
            return self.err("expected a multiplicity");
        };
        self.pos += 1;
        let n: u32 = n.try_into().map_err(|_| Error::Syntax { pos: at, msg: "multiplicity too large".into() })?;
        if n == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        Ok(n)
    }

    fn pointed_type(&mut self) -> Result<PointedIrregularType> {
        self.expect(&Tok::LBracket, "'['")?;
        let mut entries = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                self.expect(&Tok::LParen, "'('")?;
                let n = self.multiplicity()?;
                self.expect(&Tok::Comma, "','")?;
                let q = self.factor()?;
                self.expect(&Tok::RParen, "')'")?;
                entries.push((n, q));
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(&Tok::RBracket, "',' or ']'")?;
                break;
            }
        }
        PointedIrregularType::new(entries)
    }

    fn class(&mut self) -> Result<IrregularClass> {
        let mut entries = Vec::new();
        loop {
            let n = if matches!(self.peek(), Some(Tok::Int(_))) {
                let n = self.multiplicity()?;
                self.eat(&Tok::Star);
                n
            } else {
                1
            };
            self.expect(&Tok::Lt, "'<'")?;
            let q = self.factor()?;
            self.expect(&Tok::Gt, "'>'")?;
            entries.push((n, q));
            if !self.eat(&Tok::Plus) {
                break;
            }
        }
        IrregularClass::new(entries)
    }
}

pub fn parse_factor(text: &str) -> Result<ExpFactor> {
    let mut p = Parser::new(text)?;
    let q = p.factor()?;
    p.finish()?;
    Ok(q)
}

pub fn parse_cyc(text: &str) -> Result<CycNum> {
    let mut p = Parser::new(text)?;
    let v = p.expr()?;
    p.finish()?;
    v.as_constant().ok_or(Error::Syntax { pos: 0, msg: "expected a constant".into() })
}

pub fn parse_type(text: &str) -> Result<PointedIrregularType> {
    let mut p = Parser::new(text)?;
    let q = p.pointed_type()?;
    p.finish()?;
    Ok(q)
}

pub fn parse_class(text: &str) -> Result<IrregularClass> {
    let mut p = Parser::new(text)?;
    let c = p.class()?;
    p.finish()?;
    Ok(c)
}

/// Any of the three input forms, told apart by their leading syntax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Factor(ExpFactor),
    Type(PointedIrregularType),
    Class(IrregularClass),
}

pub fn parse_input(text: &str) -> Result<Input> {
    let t = text.trim_start();
    if t.starts_with('[') {
        parse_type(text).map(Input::Type)
    } else if t.contains('<') {
        parse_class(text).map(Input::Class)
    } else {
        parse_factor(text).map(Input::Factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn factors() {
        let q = parse_factor("x^(3/2)+2*x^(1/3)").unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.coeff(&rat(1, 3)), Some(&CycNum::from_int(2)));
        let q = parse_factor("E(3)*x^(1/6)").unwrap();
        assert_eq!(q.coeff(&rat(1, 6)), Some(&CycNum::root_of_unity(3)));
        let q = parse_factor("x^3 + x^{5/2} + x^(3/2) - x^(3/2) + 0*x").unwrap();
        assert_eq!(q.exponents().cloned().collect::<Vec<_>>(), vec![rat(5, 2), int(3)]);
        assert_eq!(parse_factor("x*x^(1/2)").unwrap(), parse_factor("x^(3/2)").unwrap());
        assert_eq!(parse_factor("(x^(1/2))^3/2").unwrap(), parse_factor("1/2*x^(3/2)").unwrap());
        assert_eq!(parse_factor("i*i*x").unwrap(), parse_factor("-x").unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_factor("x^(0)"), Err(Error::NonPositiveExponent(_))));
        assert!(matches!(parse_factor("1 + x"), Err(Error::NonPositiveExponent(_))));
        assert!(matches!(parse_factor("x^(-1/2)"), Err(Error::NonPositiveExponent(_))));
        assert!(matches!(parse_factor("x +"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_factor("x ? 2"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_factor("x/0"), Err(Error::DivisionByZero)));
        assert!(matches!(parse_type("[(1, x^(1/2)), (1, -x^(1/2))]"), Err(Error::DuplicateOrbit(0, 1))));
        assert!(matches!(parse_type("[(0, x)]"), Err(Error::ZeroMultiplicity)));
    }

    #[test]
    fn types_and_classes() {
        let q = parse_type("[(1, x^(3/2)+x), (1, x^(3/2)+2*x), (1, x^(1/3)), (1, 2*x^(1/3))]").unwrap();
        assert_eq!(q.rank(), 10);
        let c = parse_class("2<x^(1/2)> + <x>").unwrap();
        assert_eq!(c.rank(), 5);
        assert!(matches!(parse_input("<x>").unwrap(), Input::Class(_)));
        assert!(matches!(parse_input("[(2, x)]").unwrap(), Input::Type(_)));
        assert!(matches!(parse_input("x").unwrap(), Input::Factor(_)));
        assert_eq!(parse_cyc("(1+i)*(1-i)").unwrap(), CycNum::from_int(2));
    }
}
