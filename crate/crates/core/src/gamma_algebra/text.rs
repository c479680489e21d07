//! Text form of affine expressions, Gamma products and MB integrals.
//!
//! ```text
//! affine   := ['+'|'-'] term (('+'|'-') term)*
//! term     := var | 'i' | number ['/' number] ['*' (var | 'i') | 'i']
//! product  := factor ('*' factor)*
//! factor   := '(' affine ')'                      constant prefactor
//!           | 'Gamma(' affine ')' ['^' ['-'] int]
//!           | base '^(' affine ')'                monomial, integrals only
//! integral := ('MB' | 'MBraw') '[' [var (',' var)*] ']' product ['@' var '=' real (',' var '=' real)*]
//! ```
//!
//! Printing always produces canonical text, and parsing it back gives an equal value.

use num_traits::{One, Zero};
use std::str::FromStr;

use super::affine::{is_identifier, AffineExponent, VarId};
use super::exact::{exact_zero, parse_rational, ExactComplex, Rational};
use super::integral::MBIntegral;
use super::product::{GammaFactor, GammaProduct, MonomialFactor};
use super::AlgebraError;

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept coefficients other than ±1.
    pub allow_general_coefficients: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(char),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    opts: ParseOptions,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            out.push((st, Tok::Num(s[st..i].to_string())));
        } else if "+-*/()[]^,@=".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(AlgebraError::Parse { pos: i, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

impl Parser {
    fn new(s: &str, opts: ParseOptions) -> Result<Self, AlgebraError> {
        Ok(Parser { toks: lex(s)?, pos: 0, end: s.len(), opts })
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), AlgebraError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn number(&mut self) -> Result<Rational, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                let at = self.offset();
                self.pos += 1;
                parse_rational(&s).map_err(|_| AlgebraError::Parse { pos: at, msg: format!("bad number {s:?}") })
            }
            _ => self.err("expected a number"),
        }
    }

    fn done(&self) -> Result<(), AlgebraError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn affine(&mut self) -> Result<AffineExponent, AlgebraError> {
        let start = self.offset();
        let mut coeffs: Vec<(VarId, i64)> = Vec::new();
        let mut constant = exact_zero();
        let mut sign = if self.eat_sym('-') {
            -Rational::one()
        } else {
            self.eat_sym('+');
            Rational::one()
        };
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(name)) => {
                    self.pos += 1;
                    if name == "i" {
                        constant.im += sign;
                    } else {
                        coeffs.push((self.var(&name)?, sign.to_integer() as i64));
                    }
                }
                Some(Tok::Num(_)) => {
                    let mut r = self.number()?;
                    if self.eat_sym('/') {
                        let d = self.number()?;
                        if d.is_zero() {
                            return self.err("zero denominator");
                        }
                        r /= d;
                    }
                    r *= sign;
                    if self.peek() == Some(&Tok::Ident("i".into())) {
                        self.pos += 1;
                        constant.im += r;
                    } else if self.eat_sym('*') {
                        let name = self.ident()?;
                        if name == "i" {
                            constant.im += r;
                        } else {
                            if !r.is_integer() {
                                return self.err("variable coefficients must be integers");
                            }
                            let v = self.var(&name)?;
                            coeffs.push((
                                v,
                                i64::try_from(r.to_integer()).map_err(|_| AlgebraError::Parse {
                                    pos: start,
                                    msg: "coefficient too large".into(),
                                })?,
                            ));
                        }
                    } else {
                        constant.re += r;
                    }
                }
                _ => return self.err("expected a term"),
            }
            if self.eat_sym('+') {
                sign = Rational::one();
            } else if self.eat_sym('-') {
                sign = -Rational::one();
            } else {
                break;
            }
        }
        if self.opts.allow_general_coefficients {
            Ok(AffineExponent::new_unrestricted(coeffs, constant))
        } else {
            AffineExponent::new(coeffs, constant)
        }
    }

    fn var(&self, name: &str) -> Result<VarId, AlgebraError> {
        VarId::new(name).map_err(|_| AlgebraError::Parse { pos: self.offset(), msg: format!("bad variable {name:?}") })
    }

    fn constant(&mut self) -> Result<ExactComplex, AlgebraError> {
        let a = self.affine()?;
        if !a.is_constant() {
            return self.err("prefactor must be constant");
        }
        Ok(*a.constant_part())
    }

    fn product(&mut self, allow_monomials: bool) -> Result<(GammaProduct, Vec<MonomialFactor>), AlgebraError> {
        let mut prefactor = ExactComplex::one();
        let mut factors = Vec::new();
        let mut monomials = Vec::new();
        loop {
            if self.eat_sym('(') {
                prefactor *= self.constant()?;
                self.expect_sym(')')?;
            } else {
                let name = self.ident()?;
                if name == "Gamma" {
                    self.expect_sym('(')?;
                    let arg = self.affine()?;
                    self.expect_sym(')')?;
                    let mut power = 1i32;
                    if self.eat_sym('^') {
                        let neg = self.eat_sym('-');
                        let n = self.number()?;
                        if !n.is_integer() {
                            return self.err("Gamma powers must be integers");
                        }
                        let n = i32::try_from(n.to_integer())
                            .map_err(|_| AlgebraError::Parse { pos: self.offset(), msg: "power too large".into() })?;
                        power = if neg { -n } else { n };
                    }
                    factors.push(GammaFactor::new(arg, power));
                } else if allow_monomials && is_identifier(&name) {
                    self.expect_sym('^')?;
                    self.expect_sym('(')?;
                    let e = self.affine()?;
                    self.expect_sym(')')?;
                    monomials.push(MonomialFactor::new(name, e));
                } else {
                    return self.err(format!("unexpected {name:?}"));
                }
            }
            if !self.eat_sym('*') {
                break;
            }
        }
        Ok((GammaProduct::new(prefactor, factors), monomials))
    }

    fn real(&mut self) -> Result<f64, AlgebraError> {
        let neg = self.eat_sym('-');
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let x: f64 = s
                    .parse()
                    .map_err(|_| AlgebraError::Parse { pos: self.offset(), msg: format!("bad real {s:?}") })?;
                Ok(if neg { -x } else { x })
            }
            _ => self.err("expected a real number"),
        }
    }

    fn integral(&mut self) -> Result<MBIntegral, AlgebraError> {
        let head = self.ident()?;
        let normalized = match head.as_str() {
            "MB" => true,
            "MBraw" => false,
            _ => return self.err("expected 'MB[' or 'MBraw['"),
        };
        self.expect_sym('[')?;
        let mut vars = Vec::new();
        if !self.peek_sym(']') {
            loop {
                let n = self.ident()?;
                vars.push(self.var(&n)?);
                if !self.eat_sym(',') {
                    break;
                }
            }
        }
        self.expect_sym(']')?;
        let (p, monomials) = self.product(true)?;
        let mut m = MBIntegral::new(p, monomials, vars)?.with_normalization(normalized);
        if self.eat_sym('@') {
            let mut c = Vec::new();
            loop {
                let n = self.ident()?;
                let v = self.var(&n)?;
                self.expect_sym('=')?;
                let x = self.real()?;
                c.push((v, x));
                if !self.eat_sym(',') {
                    break;
                }
            }
            let order: Vec<VarId> = c.iter().map(|p| p.0.clone()).collect();
            if order != m.vars() {
                return self.err("contour must list the variables in integration order");
            }
            m = m.with_contour(c.into_iter().map(|p| p.1).collect())?;
        }
        Ok(m)
    }
}

pub fn parse_affine_with(s: &str, opts: ParseOptions) -> Result<AffineExponent, AlgebraError> {
    let mut p = Parser::new(s, opts)?;
    let a = p.affine()?;
    p.done()?;
    Ok(a)
}

pub fn parse_affine(s: &str) -> Result<AffineExponent, AlgebraError> {
    parse_affine_with(s, ParseOptions::default())
}

pub fn parse_product_with(s: &str, opts: ParseOptions) -> Result<GammaProduct, AlgebraError> {
    let mut p = Parser::new(s, opts)?;
    let (g, _) = p.product(false)?;
    p.done()?;
    Ok(g)
}

pub fn parse_product(s: &str) -> Result<GammaProduct, AlgebraError> {
    parse_product_with(s, ParseOptions::default())
}

pub fn parse_integral_with(s: &str, opts: ParseOptions) -> Result<MBIntegral, AlgebraError> {
    let mut p = Parser::new(s, opts)?;
    let m = p.integral()?;
    p.done()?;
    Ok(m)
}

pub fn parse_integral(s: &str) -> Result<MBIntegral, AlgebraError> {
    parse_integral_with(s, ParseOptions::default())
}

/// A complex constant such as `0.3`, `-1/2 + 2*i` or `0.7 - 0.2*i`.
pub fn parse_constant(s: &str) -> Result<ExactComplex, AlgebraError> {
    let mut p = Parser::new(s, ParseOptions::default())?;
    let c = p.constant()?;
    p.done()?;
    Ok(c)
}

impl FromStr for AffineExponent {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_affine(s)
    }
}

impl FromStr for GammaProduct {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_product(s)
    }
}

impl FromStr for MBIntegral {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_integral(s)
    }
}
