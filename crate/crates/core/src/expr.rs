//! Expression language for Grassmann elements, polynomials and superfunctions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' nat)?
//! base   := rational | 't' nat | 'x' nat | '(' expr ')'
//! ```
//!
//! `rational` is `digits` or `digits/digits`. `t<k>` is the odd generator
//! `θ_k`, `x<k>` an even variable. Whitespace is ignored. A leading minus
//! binds looser than `^`, so `-x1^2` is `-(x1^2)`.
//!
//! Canonical printing writes terms in the owning type's order, each as the
//! coefficient, `*`, and the factors ascending; unit coefficients are left
//! out and a lone constant is printed as is. Zero prints as `0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::skeleton::Superfunction;

const MAX_EXPONENT: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Gen { index: usize, offset: usize },
    Var { index: usize, offset: usize },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Num(Rational),
    Gen(usize),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits_at = |mut j: usize| {
        let start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        (start, j)
    };
    let index = |start: usize, end: usize, at: usize| -> Result<usize> {
        if start == end {
            return Err(err(at, "expected an index after the letter"));
        }
        text[start..end].parse().map_err(|_| err(at, "index too large"))
    };
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b't' | b'x' => {
                let (s, e) = digits_at(i + 1);
                let k = index(s, e, start)?;
                i = e;
                out.push((if b == b't' { Token::Gen(k) } else { Token::Var(k) }, start));
                continue;
            }
            b'0'..=b'9' => {
                let (s, mut e) = digits_at(i);
                if e < bytes.len() && bytes[e] == b'/' {
                    let (ds, de) = digits_at(e + 1);
                    if ds == de {
                        return Err(err(e, "expected a denominator after '/'"));
                    }
                    e = de;
                }
                let r = rational::parse(&text[s..e]).map_err(|_| err(start, "zero denominator"))?;
                i = e;
                out.push((Token::Num(r), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unexpected character {ch:?}")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let at = self.offset();
            return match self.next() {
                Some((Token::Num(r), _)) if r.is_integer() => {
                    let k: u32 = r
                        .numer()
                        .try_into()
                        .ok()
                        .filter(|k| *k <= MAX_EXPONENT)
                        .ok_or_else(|| err(at, "exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                Some((Token::Minus, _)) => Err(err(at, "negative exponent")),
                Some(_) => Err(err(at, "exponent must be a non-negative integer")),
                None => Err(err(at, "unexpected end of input, expected an exponent")),
            };
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.next() {
            Some((Token::Num(r), _)) => Ok(Expr::Const(r)),
            Some((Token::Gen(index), offset)) => Ok(Expr::Gen { index, offset }),
            Some((Token::Var(index), offset)) => Ok(Expr::Var { index, offset }),
            Some((Token::LParen, _)) => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.next() {
                    Some((Token::RParen, _)) => Ok(inner),
                    _ => Err(err(close, "expected ')'")),
                }
            }
            Some((tok, _)) => Err(err(at, format!("unexpected {}", describe(&tok)))),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

fn describe(tok: &Token) -> &'static str {
    match tok {
        Token::Num(_) => "number",
        Token::Gen(_) => "generator",
        Token::Var(_) => "variable",
        Token::Plus => "'+'",
        Token::Minus => "'-'",
        Token::Star => "'*'",
        Token::Caret => "'^'",
        Token::LParen => "'('",
        Token::RParen => "')'",
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let e = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        let (tok, at) = &parser.tokens[parser.pos];
        return Err(err(*at, format!("unexpected {}", describe(tok))));
    }
    Ok(e)
}

/// A target ring for expression evaluation.
pub trait Algebra {
    type Value: Clone;

    fn constant(&self, r: &Rational) -> Self::Value;
    fn generator(&self, index: usize, offset: usize) -> Result<Self::Value>;
    fn variable(&self, index: usize, offset: usize) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn neg(&self, a: &Self::Value) -> Self::Value {
        self.mul(&self.constant(&-Rational::one()), a)
    }
}

impl Expr {
    pub fn eval<A: Algebra>(&self, alg: &A) -> Result<A::Value> {
        Ok(match self {
            Expr::Const(r) => alg.constant(r),
            Expr::Gen { index, offset } => alg.generator(*index, *offset)?,
            Expr::Var { index, offset } => alg.variable(*index, *offset)?,
            Expr::Add(a, b) => alg.add(&a.eval(alg)?, &b.eval(alg)?),
            Expr::Sub(a, b) => alg.add(&a.eval(alg)?, &alg.neg(&b.eval(alg)?)),
            Expr::Mul(a, b) => alg.mul(&a.eval(alg)?, &b.eval(alg)?),
            Expr::Neg(a) => alg.neg(&a.eval(alg)?),
            Expr::Pow(a, k) => {
                let base = a.eval(alg)?;
                let mut acc = alg.constant(&Rational::one());
                for _ in 0..*k {
                    acc = alg.mul(&acc, &base);
                }
                acc
            }
        })
    }
}

impl Expr {
    /// Largest `t<k>` index in the expression, 0 if none.
    pub fn max_generator(&self) -> usize {
        self.fold_max(&|e| if let Expr::Gen { index, .. } = e { *index } else { 0 })
    }

    /// Largest `x<k>` index in the expression, 0 if none.
    pub fn max_variable(&self) -> usize {
        self.fold_max(&|e| if let Expr::Var { index, .. } = e { *index } else { 0 })
    }

    fn fold_max(&self, leaf: &dyn Fn(&Expr) -> usize) -> usize {
        match self {
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.fold_max(leaf).max(b.fold_max(leaf)),
            Expr::Neg(a) | Expr::Pow(a, _) => a.fold_max(leaf),
            leafy => leaf(leafy),
        }
    }
}

/// Evaluates in `Λ_n`; `x<k>` is bound to `vars[k - 1]` (used by point families).
pub struct GrassmannContext<'a> {
    pub n: usize,
    pub vars: &'a [GrassmannElement],
}

impl Algebra for GrassmannContext<'_> {
    type Value = GrassmannElement;

    fn constant(&self, r: &Rational) -> GrassmannElement {
        GrassmannElement::constant(self.n, r.clone())
    }

    fn generator(&self, index: usize, _offset: usize) -> Result<GrassmannElement> {
        GrassmannElement::generator(self.n, index)
    }

    fn variable(&self, index: usize, _offset: usize) -> Result<GrassmannElement> {
        index
            .checked_sub(1)
            .and_then(|i| self.vars.get(i))
            .cloned()
            .ok_or(Error::VariableRange { index, p: self.vars.len() })
    }

    fn add(&self, a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
        a + b
    }

    fn mul(&self, a: &GrassmannElement, b: &GrassmannElement) -> GrassmannElement {
        a * b
    }

    fn neg(&self, a: &GrassmannElement) -> GrassmannElement {
        -a
    }
}

/// Evaluates in `C[x1..xp] ⊗ Λ(t1..tq)`.
pub struct SuperfunctionContext {
    pub p: usize,
    pub q: usize,
}

impl Algebra for SuperfunctionContext {
    type Value = Superfunction;

    fn constant(&self, r: &Rational) -> Superfunction {
        Superfunction::constant(self.p, self.q, r.clone())
    }

    fn generator(&self, index: usize, _offset: usize) -> Result<Superfunction> {
        Superfunction::odd_coordinate(self.p, self.q, index)
    }

    fn variable(&self, index: usize, _offset: usize) -> Result<Superfunction> {
        Superfunction::even_coordinate(self.p, self.q, index)
    }

    fn add(&self, a: &Superfunction, b: &Superfunction) -> Superfunction {
        a.try_add(b).expect("same format")
    }

    fn mul(&self, a: &Superfunction, b: &Superfunction) -> Superfunction {
        a.try_mul(b).expect("same format")
    }
}

/// Evaluates in `Q[x1..xp]`.
pub struct PolyContext {
    pub p: usize,
}

impl Algebra for PolyContext {
    type Value = Poly;

    fn constant(&self, r: &Rational) -> Poly {
        Poly::constant(self.p, r.clone())
    }

    fn generator(&self, index: usize, _offset: usize) -> Result<Poly> {
        Err(Error::GeneratorRange { index, n: 0 })
    }

    fn variable(&self, index: usize, _offset: usize) -> Result<Poly> {
        Poly::var(self.p, index)
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a + b
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a * b
    }
}

/// Parses an element of `Λ_n`.
pub fn parse_element(text: &str, n: usize) -> Result<GrassmannElement> {
    parse(text)?.eval(&GrassmannContext { n, vars: &[] })
}

/// Parses a superfunction on `K^{p|q}`: `x<k>` even coordinates, `t<k>` odd ones.
pub fn parse_superfunction(text: &str, p: usize, q: usize) -> Result<Superfunction> {
    parse(text)?.eval(&SuperfunctionContext { p, q })
}

/// Parses a polynomial in `x1..xp`.
pub fn parse_poly(text: &str, p: usize) -> Result<Poly> {
    parse(text)?.eval(&PolyContext { p })
}

/// Joins `(coefficient, factors)` terms into canonical text.
pub fn render_terms<I>(terms: I) -> String
where
    I: IntoIterator<Item = (Rational, Vec<String>)>,
{
    let mut out = String::new();
    for (c, factors) in terms {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mag = c.abs();
        let mut parts = Vec::with_capacity(factors.len() + 1);
        if factors.is_empty() || !mag.is_one() {
            parts.push(rational::format(&mag));
        }
        parts.extend(factors);
        out.push_str(&parts.join("*"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::element;
    use crate::rational::{frac, int};

    #[test]
    fn parses_examples() {
        let a = parse_element("t1*t2 + 3", 2).unwrap();
        assert_eq!(a, element(2, &[(&[], int(3)), (&[1, 2], int(1))]).unwrap());
        let b = parse_element("t2*t1", 2).unwrap();
        assert_eq!(b, element(2, &[(&[1, 2], int(-1))]).unwrap());
        assert!(parse_element("t1^2", 2).unwrap().is_zero());
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_poly("-x1^2", 1).unwrap(), parse_poly("-(x1*x1)", 1).unwrap());
        assert_eq!(parse_poly("2*x1 + 3*x1", 1).unwrap(), parse_poly("5*x1", 1).unwrap());
        assert_eq!(parse_poly("1 - 2 - 3", 0).unwrap(), Poly::constant(0, int(-4)));
        assert_eq!(parse_poly("(1 + x1)^2", 1).unwrap(), parse_poly("1 + 2*x1 + x1^2", 1).unwrap());
        assert_eq!(parse_element("- -t1", 1).unwrap(), parse_element("t1", 1).unwrap());
        assert_eq!(
            parse_element("3/4 * t1", 1).unwrap(),
            element(1, &[(&[1], frac(3, 4))]).unwrap()
        );
    }

    #[test]
    fn error_offsets() {
        let at = |s: &str| match parse(s) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(at("t1 + "), 5);
        assert_eq!(at("t1 + y"), 5);
        assert_eq!(at("(t1"), 3);
        assert_eq!(at("t1 t2"), 3);
        assert_eq!(at("x1^-2"), 3);
        assert_eq!(at("1/"), 1);
        assert_eq!(at("t"), 0);
        match parse("x1^-2") {
            Err(Error::Parse { message, .. }) => assert_eq!(message, "negative exponent"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn range_errors() {
        assert_eq!(parse_element("t3", 2), Err(Error::GeneratorRange { index: 3, n: 2 }));
        assert_eq!(parse_element("t0", 2), Err(Error::GeneratorRange { index: 0, n: 2 }));
        assert!(matches!(parse_element("x1", 2), Err(Error::VariableRange { .. })));
        assert!(matches!(parse_poly("x2", 1), Err(Error::VariableRange { .. })));
        assert!(matches!(parse_poly("t1", 1), Err(Error::GeneratorRange { .. })));
    }

    #[test]
    fn renders() {
        let terms = vec![
            (int(3), vec![]),
            (int(-1), vec!["t1".to_string()]),
            (frac(1, 2), vec!["t1".into(), "t2".into()]),
        ];
        assert_eq!(render_terms(terms), "3 - t1 + 1/2*t1*t2");
        assert_eq!(render_terms(vec![(int(-1), vec![])]), "-1");
        assert_eq!(render_terms(Vec::new()), "0");
    }
}
