//! Polynomial expressions with exact rational literals.
//!
//! Grammar: sums of products of powers; `/` only divides by a nonzero
//! constant; identifiers resolve through a caller-supplied lookup.

use nilflux_core::poly::{PolyScalar, Var};
use nilflux_core::rational::{parse_rational, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError(pub String);

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<Tok>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            if lit.contains('.') {
                return Err(ExprError(format!("decimal literal `{lit}` in `{text}` is rejected; write it as p/q")));
            }
            out.push(Tok::Num(lit));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()·".contains(c) {
            out.push(Tok::Op(if c == '·' { '*' } else { c }));
            i += 1;
        } else {
            return Err(ExprError(format!("unexpected character `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    text: &'a str,
    resolve: &'a dyn Fn(&str) -> Option<Var>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, msg: &str) -> ExprError {
        ExprError(format!("{msg} in `{}`", self.text))
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<PolyScalar, ExprError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc += &self.product()?;
            } else if self.eat('-') {
                acc -= &self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<PolyScalar, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                let d = d.as_constant().ok_or_else(|| self.err("division by a non-constant"))?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = acc.scale(&d.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PolyScalar, ExprError> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolyScalar, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.parse().map_err(|_| self.err("bad exponent"))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("exponent must be a nonnegative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PolyScalar, ExprError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let r: Rational = parse_rational(&n).map_err(|e| ExprError(e.to_string()))?;
                Ok(PolyScalar::constant(r))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let v = (self.resolve)(&name).unwrap_or_else(|| Var::param(&name));
                Ok(PolyScalar::var(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("missing `)`"));
                }
                Ok(inner)
            }
            _ => Err(self.err("expected a number, name or `(`")),
        }
    }
}

/// Parses `text`; names not claimed by `resolve` become free parameters.
pub fn parse_poly(text: &str, resolve: &dyn Fn(&str) -> Option<Var>) -> Result<PolyScalar, ExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ExprError("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, text, resolve };
    let out = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}
