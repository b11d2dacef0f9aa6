//! Parser and evaluator for web definition files.
//!
//! A web file names two expressions `f1` and `f2` in the variables
//! `x1, x2, y1, y2`; the three foliations of the web are the level sets
//! of x, y and f(x, y). Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' integer)?
//! atom   := number | variable | func '(' expr ')' | '(' expr ')' | '-' atom
//! ```

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::webframe::BasePoint;

/// One of the four base coordinates on M^4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    Y1,
    Y2,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::Y1 => "y1",
            Var::Y2 => "y2",
        }
    }

    /// Index into the (x1, x2, y1, y2) ordering used by jets and points.
    pub fn axis(self) -> usize {
        match self {
            Var::X1 => 0,
            Var::X2 => 1,
            Var::Y1 => 2,
            Var::Y2 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

/// Expression AST. Numeric literals are kept as exact rationals; they are
/// converted to floating point only at evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(Var),
    Lit(Ratio<i64>),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Apply(Func, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Lit(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "({}/{})", r.numer(), r.denom())
                }
            }
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Pow(b, n) => write!(f, "({b} ^ {n})"),
            Expr::Apply(fun, e) => write!(f, "{}({e})", fun.name()),
        }
    }
}

/// A parsed web z = f(x, y).
#[derive(Debug, Clone, PartialEq)]
pub struct WebDefinition {
    pub f1: Expr,
    pub f2: Expr,
    pub name: Option<String>,
}

impl WebDefinition {
    pub fn component(&self, i: usize) -> &Expr {
        match i {
            0 => &self.f1,
            1 => &self.f2,
            _ => panic!("web component index out of range: {i}"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("unknown variable `{0}` (expected one of x1, x2, y1, y2)")]
    UnknownVariable(String),
    #[error("non-integer exponent `{0}`")]
    NonIntegerExponent(String),
    #[error("point has {0} components, expected 4")]
    Arity(usize),
    #[error("missing definition for `{0}` in web file")]
    MissingComponent(&'static str),
    #[error("number literal `{0}` out of range")]
    NumberRange(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Ratio<i64>, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<(usize, Tok), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::Eof));
        }
        let c = self.src[self.pos];
        self.pos += 1;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Num(parse_decimal(text)?, text.to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(
                    std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap()
                        .to_string(),
                )
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    expected: "a term".into(),
                    found: format!("`{}`", other as char),
                })
            }
        };
        Ok((start, tok))
    }
}

/// Parse a decimal string like "3", "0.25" into an exact rational.
fn parse_decimal(text: &str) -> Result<Ratio<i64>, ParseError> {
    let bad = || ParseError::NumberRange(text.to_string());
    if text.chars().filter(|&c| c == '.').count() > 1 {
        return Err(ParseError::Syntax {
            pos: 0,
            expected: "a number".into(),
            found: format!("`{text}`"),
        });
    }
    if let Some(dot) = text.find('.') {
        let int = &text[..dot];
        let frac = &text[dot + 1..];
        let int_v: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let denom = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let frac_v: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Ok(Ratio::new(
            int_v.checked_mul(denom).ok_or_else(bad)?.checked_add(frac_v).ok_or_else(bad)?,
            denom,
        ))
    } else {
        Ok(Ratio::from_integer(text.parse().map_err(|_| bad())?))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: (usize, Tok),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let look = lexer.next_tok()?;
        Ok(Parser { lexer, look })
    }

    fn bump(&mut self) -> Result<(usize, Tok), ParseError> {
        let cur = std::mem::replace(&mut self.look, (0, Tok::Eof));
        self.look = self.lexer.next_tok()?;
        Ok(cur)
    }

    fn expect(&mut self, want: &Tok, expected: &str) -> Result<(), ParseError> {
        if &self.look.1 == want {
            self.bump()?;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.look.0,
                expected: expected.into(),
                found: self.look.1.describe(),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.look.1 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.look.1 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump()?;
            let rhs = self.factor()?;
            // fold exact rational literals so "3/2" stays one literal
            if let (BinOp::Div, Expr::Lit(a), Expr::Lit(b)) = (op, &lhs, &rhs) {
                if *b.numer() != 0 {
                    lhs = Expr::Lit(a / b);
                    continue;
                }
            }
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.look.1 == Tok::Caret {
            self.bump()?;
            let neg = if self.look.1 == Tok::Minus {
                self.bump()?;
                true
            } else {
                false
            };
            match self.bump()? {
                (_, Tok::Num(r, text)) => {
                    if !r.is_integer() {
                        return Err(ParseError::NonIntegerExponent(text));
                    }
                    let n = i32::try_from(*r.numer())
                        .map_err(|_| ParseError::NumberRange(text.clone()))?;
                    Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
                }
                (pos, other) => Err(ParseError::Syntax {
                    pos,
                    expected: "an integer exponent".into(),
                    found: other.describe(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump()? {
            (_, Tok::Num(r, _)) => Ok(Expr::Lit(r)),
            (_, Tok::Minus) => Ok(Expr::Neg(Box::new(self.atom()?))),
            (_, Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            (pos, Tok::Ident(name)) => match name.as_str() {
                "x1" => Ok(Expr::Var(Var::X1)),
                "x2" => Ok(Expr::Var(Var::X2)),
                "y1" => Ok(Expr::Var(Var::Y1)),
                "y2" => Ok(Expr::Var(Var::Y2)),
                "sin" | "cos" | "exp" | "log" => {
                    let f = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "exp" => Func::Exp,
                        _ => Func::Log,
                    };
                    self.expect(&Tok::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Expr::Apply(f, Box::new(arg)))
                }
                _ if name.starts_with('x') || name.starts_with('y') => {
                    Err(ParseError::UnknownVariable(name))
                }
                _ => Err(ParseError::Syntax {
                    pos,
                    expected: "a variable, number or function".into(),
                    found: format!("identifier `{name}`"),
                }),
            },
            (pos, other) => Err(ParseError::Syntax {
                pos,
                expected: "a variable, number or `(`".into(),
                found: other.describe(),
            }),
        }
    }

    fn finish(self, e: Expr) -> Result<Expr, ParseError> {
        if self.look.1 == Tok::Eof {
            Ok(e)
        } else {
            Err(ParseError::Syntax {
                pos: self.look.0,
                expected: "end of expression".into(),
                found: self.look.1.describe(),
            })
        }
    }
}

/// Parse a single expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish(e)
}

/// Parse the contents of a web definition file.
///
/// Lines of the form `f1 = <expr>` and `f2 = <expr>` are required; a
/// `name = <text>` line is optional. `#` starts a comment; blank lines are
/// ignored. Accepts LF or CRLF.
pub fn parse_web(text: &str) -> Result<WebDefinition, ParseError> {
    let mut f1 = None;
    let mut f2 = None;
    let mut name = None;
    for raw in text.lines() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some(kv) => kv,
            None => {
                return Err(ParseError::Syntax {
                    pos: 0,
                    expected: "`key = value`".into(),
                    found: format!("`{line}`"),
                })
            }
        };
        match key.trim() {
            "f1" => f1 = Some(parse_expr(value)?),
            "f2" => f2 = Some(parse_expr(value)?),
            "name" => name = Some(value.trim().to_string()),
            other => {
                return Err(ParseError::Syntax {
                    pos: 0,
                    expected: "`f1`, `f2` or `name`".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    Ok(WebDefinition {
        f1: f1.ok_or(ParseError::MissingComponent("f1"))?,
        f2: f2.ok_or(ParseError::MissingComponent("f2"))?,
        name,
    })
}

/// Parse a base point given as four comma-separated decimals "v1,v2,v3,v4"
/// in the order (x1, x2, y1, y2).
pub fn parse_point(text: &str) -> Result<BasePoint, ParseError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(ParseError::Arity(parts.len()));
    }
    let mut v = [0.0f64; 4];
    for (i, part) in parts.iter().enumerate() {
        let t = part.trim();
        v[i] = t.parse::<f64>().map_err(|_| ParseError::Syntax {
            pos: 0,
            expected: "a decimal number".into(),
            found: format!("`{t}`"),
        })?;
        if !v[i].is_finite() {
            return Err(ParseError::NumberRange(t.to_string()));
        }
    }
    Ok(BasePoint::new(v[0], v[1], v[2], v[3]))
}

/// Numeric evaluation error for `evaluate`.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("singular evaluation of `{0}`")]
    Singular(String),
}

/// Evaluate an expression at a point with plain f64 arithmetic.
///
/// This is the reference evaluator used by the finite-difference oracle; it
/// shares no code with the jet arithmetic it is used to check.
pub fn evaluate(e: &Expr, p: &BasePoint) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Var(v) => p.coord(v.axis()),
        Expr::Lit(r) => *r.numer() as f64 / *r.denom() as f64,
        Expr::Neg(a) => -evaluate(a, p)?,
        Expr::Bin(op, a, b) => {
            let (x, y) = (evaluate(a, p)?, evaluate(b, p)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.abs() < 1e-12 {
                        return Err(EvalError::Singular(e.to_string()));
                    }
                    x / y
                }
            }
        }
        Expr::Pow(b, n) => {
            let x = evaluate(b, p)?;
            if *n < 0 && x.abs() < 1e-12 {
                return Err(EvalError::Singular(e.to_string()));
            }
            x.powi(*n)
        }
        Expr::Apply(f, a) => {
            let x = evaluate(a, p)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 1e-12 {
                        return Err(EvalError::Singular(e.to_string()));
                    }
                    x.ln()
                }
            }
        }
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_parallelizable_web() {
        let w = parse_web("f1 = x1 + y1\nf2 = x2 + y2").unwrap();
        assert_eq!(
            w.f1,
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Var(Var::X1)),
                Box::new(Expr::Var(Var::Y1))
            )
        );
        assert!(w.name.is_none());
    }

    #[test]
    fn parses_affine_group_web() {
        let w = parse_web("f1 = x1 * y1\nf2 = x1 * y2 + x2").unwrap();
        assert_eq!(
            w.f2,
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Var(Var::X1)),
                    Box::new(Expr::Var(Var::Y2))
                )),
                Box::new(Expr::Var(Var::X2))
            )
        );
    }

    #[test]
    fn rejects_unknown_variable() {
        let err = parse_web("f1 = x3 + y1\nf2 = x2").unwrap_err();
        assert_eq!(err, ParseError::UnknownVariable("x3".into()));
    }

    #[test]
    fn rejects_non_integer_exponent() {
        let err = parse_expr("x1 ^ 1.5").unwrap_err();
        assert_eq!(err, ParseError::NonIntegerExponent("1.5".into()));
    }

    #[test]
    fn comments_and_crlf() {
        let w = parse_web("# header\r\nf1 = x1 # trailing\r\nf2 = y2\r\n").unwrap();
        assert_eq!(w.f1, Expr::Var(Var::X1));
    }

    #[test]
    fn point_parsing() {
        let p = parse_point("1,0,1,0").unwrap();
        assert_eq!(p.coords(), [1.0, 0.0, 1.0, 0.0]);
        assert_eq!(parse_point("0,0,0,0").unwrap().coords(), [0.0; 4]);
        assert_eq!(parse_point("1,2").unwrap_err(), ParseError::Arity(2));
    }

    #[test]
    fn decimal_literals_are_exact_rationals() {
        match parse_expr("0.25").unwrap() {
            Expr::Lit(r) => assert_eq!(r, Ratio::new(1, 4)),
            other => panic!("unexpected {other:?}"),
        }
        // "3/2" folds to a single exact rational literal
        match parse_expr("3/2").unwrap() {
            Expr::Lit(r) => assert_eq!(r, Ratio::new(3, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "x1 + y1 * x2",
            "x1 * y1 - x2 / (y2 + 2)",
            "sin(x1) + cos(y2) ^ 3",
            "-(x1 + y1) ^ 2 * exp(x2 * y2)",
            "log(x1 + 2) - 0.5 * y1",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            let re = parse_expr(&printed).unwrap();
            assert_eq!(e, re, "round trip failed for {src} -> {printed}");
        }
    }
}
