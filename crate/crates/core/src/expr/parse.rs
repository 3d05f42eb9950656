//! Tokenizer and recursive-descent parser for the coefficient grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor ("*" factor)*
//! factor := base ("^" uint)?
//! base   := number | "i" | "pi" | ident | "(" expr ")" | "exp" "(" expr ")" | "-" factor
//! ident  := letter (letter|digit)* ("_")?
//! ```

use num_complex::Complex64;
use thiserror::Error;

use super::{CoeffExpr, ExprError, VarTable};
use crate::exact::{decimal_to_rational, Gaussian};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdent { pos: usize, name: String },
    #[error("argument of exp at position {pos} is not affine in the variables")]
    NonAffineExp { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < b.len() {
        let c = b[k] as char;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let start = k;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() || d == '.' => {
                while k < b.len() && ((b[k] as char).is_ascii_digit() || b[k] == b'.') {
                    k += 1;
                }
                if k < b.len() && (b[k] == b'e' || b[k] == b'E') {
                    let mut j = k + 1;
                    if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                        j += 1;
                    }
                    if j < b.len() && (b[j] as char).is_ascii_digit() {
                        k = j;
                        while k < b.len() && (b[k] as char).is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let lit = &s[start..k];
                if lit.matches('.').count() > 1 || lit == "." {
                    return Err(ParseError::Syntax { pos: start, msg: format!("malformed number `{lit}`") });
                }
                out.push((start, Tok::Num(lit.to_string())));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                while k < b.len() && (b[k] as char).is_ascii_alphanumeric() {
                    k += 1;
                }
                if k < b.len() && b[k] == b'_' {
                    k += 1;
                }
                out.push((start, Tok::Ident(s[start..k].to_string())));
                continue;
            }
            other => {
                return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{other}`") })
            }
        };
        out.push((start, tok));
        k += 1;
    }
    Ok(out)
}

/// Parsed syntax tree, kept so constants can also be evaluated exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(String),
    I,
    Pi,
    Var(String),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
    Neg(Box<Ast>),
    Exp(Box<Ast>, usize),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    k: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.k).map(|t| &t.1)
    }
    fn pos(&self) -> usize {
        self.toks.get(self.k).map(|t| t.0).unwrap_or(self.len)
    }
    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.to_string() })
    }
    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.k += 1;
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }
    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.k += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.k += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }
    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.k += 1;
            lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }
    fn factor(&mut self) -> Result<Ast, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.k += 1;
            return Ok(Ast::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.k += 1;
            match self.peek() {
                Some(Tok::Num(s)) if s.chars().all(|c| c.is_ascii_digit()) => {
                    let e: u32 = s.parse().map_err(|_| ParseError::Syntax { pos: self.pos(), msg: "exponent too large".into() })?;
                    self.k += 1;
                    return Ok(Ast::Pow(Box::new(base), e));
                }
                _ => return self.err("expected a non-negative integer exponent"),
            }
        }
        Ok(base)
    }
    fn base(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.k += 1;
                Ok(Ast::Num(s))
            }
            Some(Tok::LParen) => {
                self.k += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.k += 1;
                match name.as_str() {
                    "i" => Ok(Ast::I),
                    "pi" => Ok(Ast::Pi),
                    "exp" => {
                        self.expect(Tok::LParen, "`(` after exp")?;
                        let e = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Ast::Exp(Box::new(e), pos))
                    }
                    _ => Ok(Ast::Var(name)),
                }
            }
            Some(Tok::Minus) => self.factor(),
            _ => self.err("expected a number, identifier or `(`"),
        }
    }
}

pub fn parse_ast(text: &str) -> Result<Ast, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, k: 0, len: text.len() };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

fn positions(text: &str) -> Vec<(usize, String)> {
    tokenize(text)
        .map(|ts| {
            ts.into_iter()
                .filter_map(|(p, t)| match t {
                    Tok::Ident(s) => Some((p, s)),
                    _ => None,
                })
                .collect()
        })
        .unwrap_or_default()
}

fn lower(ast: &Ast, vars: &VarTable, text: &str) -> Result<CoeffExpr, ParseError> {
    Ok(match ast {
        Ast::Num(s) => {
            let v: f64 = s.parse().map_err(|_| ParseError::Syntax { pos: 0, msg: format!("bad number `{s}`") })?;
            CoeffExpr::real(v)
        }
        Ast::I => CoeffExpr::constant(Complex64::new(0.0, 1.0)),
        Ast::Pi => CoeffExpr::real(std::f64::consts::PI),
        Ast::Var(name) => match vars.lookup(name) {
            Some(v) => CoeffExpr::var(v),
            None => {
                let pos = positions(text).into_iter().find(|(_, s)| s == name).map(|(p, _)| p).unwrap_or(0);
                return Err(ParseError::UnknownIdent { pos, name: name.clone() });
            }
        },
        Ast::Add(a, b) => lower(a, vars, text)?.add(&lower(b, vars, text)?),
        Ast::Sub(a, b) => lower(a, vars, text)?.sub(&lower(b, vars, text)?),
        Ast::Mul(a, b) => lower(a, vars, text)?.mul(&lower(b, vars, text)?),
        Ast::Pow(a, e) => lower(a, vars, text)?.pow(*e),
        Ast::Neg(a) => lower(a, vars, text)?.neg(),
        Ast::Exp(a, pos) => {
            let inner = lower(a, vars, text)?;
            let (c0, lin) = inner.as_affine().ok_or(ParseError::NonAffineExp { pos: *pos })?;
            if lin.is_empty() {
                CoeffExpr::constant(c0.exp())
            } else {
                CoeffExpr::exp_linear(c0.exp(), &lin)
            }
        }
    })
}

/// Parses `text` against `vars` into canonical form.
pub fn parse(text: &str, vars: &VarTable) -> Result<CoeffExpr, ExprError> {
    let ast = parse_ast(text)?;
    Ok(lower(&ast, vars, text)?)
}

fn exact(ast: &Ast) -> Option<Gaussian> {
    Some(match ast {
        Ast::Num(s) => Gaussian::from_rat(decimal_to_rational(s)?),
        Ast::I => Gaussian::i(),
        Ast::Pi | Ast::Var(_) | Ast::Exp(..) => return None,
        Ast::Add(a, b) => exact(a)? + exact(b)?,
        Ast::Sub(a, b) => exact(a)? - exact(b)?,
        Ast::Mul(a, b) => exact(a)? * exact(b)?,
        Ast::Pow(a, e) => exact(a)?.pow(*e),
        Ast::Neg(a) => -exact(a)?,
    })
}

/// Exact Gaussian-rational value of a constant expression built from decimal
/// literals and `i`. Returns `Ok(None)` for constants involving `pi` or `exp`.
pub fn parse_exact_constant(text: &str) -> Result<Option<Gaussian>, ExprError> {
    let ast = parse_ast(text)?;
    // reject variables with the usual error
    lower(&ast, &VarTable::empty(), text)?;
    Ok(exact(&ast))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::VarId;

    fn vt() -> VarTable {
        VarTable::new(&["z", "w"]).unwrap()
    }

    #[test]
    fn torus_exponential() {
        let e = parse("exp(pi*i*(w + w_))", &vt()).unwrap();
        let terms = e.terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coefficient, Complex64::new(1.0, 0.0));
        let pi_i = Complex64::new(0.0, std::f64::consts::PI);
        assert_eq!(terms[0].exp_factor.get(&VarId::holo(1)), Some(&pi_i));
        assert_eq!(terms[0].exp_factor.get(&VarId::anti(1)), Some(&pi_i));
    }

    #[test]
    fn polynomial_literal() {
        let e = parse("2*w_ + w_^2", &vt()).unwrap();
        let ex: Vec<_> = e.terms().into_iter().map(|t| t.exponents).collect();
        assert_eq!(ex.len(), 2);
        assert!(ex.iter().any(|m| m.get(&VarId::anti(1)) == Some(&1)));
        assert!(ex.iter().any(|m| m.get(&VarId::anti(1)) == Some(&2)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse("z + q", &vt()) {
            Err(ExprError::Parse(ParseError::UnknownIdent { pos, name })) => {
                assert_eq!((pos, name.as_str()), (4, "q"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("z +", &vt()), Err(ExprError::Parse(ParseError::Syntax { pos: 3, .. }))));
        assert!(matches!(parse("exp(w*w)", &vt()), Err(ExprError::Parse(ParseError::NonAffineExp { pos: 0 }))));
        assert!(matches!(parse("z ^ w", &vt()), Err(ExprError::Parse(ParseError::Syntax { .. }))));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse("-w^2", &vt()).unwrap(), parse("0 - w*w", &vt()).unwrap());
    }

    #[test]
    fn exp_constant_part_moves_to_coefficient() {
        let e = parse("exp(1 + w)", &vt()).unwrap();
        assert_eq!(e.terms()[0].coefficient, Complex64::new(std::f64::consts::E, 0.0));
    }

    #[test]
    fn exact_constants() {
        let g = parse_exact_constant("(0.5 - 2*i)^2").unwrap().unwrap();
        assert_eq!(g, Gaussian::new(crate::exact::rat(-15, 4), crate::exact::rat(-2, 1)));
        assert_eq!(parse_exact_constant("pi").unwrap(), None);
        assert!(parse_exact_constant("w").is_err());
    }
}
