//! Envelope expressions: `prod(n, e1, e2)`, `d(e)`, `c:<rational>*e`, sums and
//! generator names.

use std::fmt;

use confenv_core::envelope::Envelope;
use confenv_core::error::Result as CoreResult;
use confenv_core::ops::{poly_add_all, poly_scale, OpPoly};
use confenv_core::poly::{parse_rational, Rational};
use num_traits::One;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Gen(String),
    Prod(u32, Box<Expr>, Box<Expr>),
    D(Box<Expr>),
    Scale(Rational, Box<Expr>),
    Sum(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.message)
    }
}

impl std::error::Error for ExprError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected `{}`", c as char))
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| f(*c)) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'(') {
            let e = self.sum()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let start = self.pos;
        let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_').to_string();
        match word.as_str() {
            "" => self.fail("expected an expression"),
            "c" if self.eat(b':') => {
                let num = self.take_while(|c| c.is_ascii_digit() || c == b'-' || c == b'/').to_string();
                let Ok(r) = parse_rational(&num) else {
                    self.pos = start;
                    return self.fail(format!("bad rational `{num}`"));
                };
                self.expect(b'*')?;
                Ok(Expr::Scale(r, Box::new(self.term()?)))
            }
            "d" if self.eat(b'(') => {
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(Expr::D(Box::new(e)))
            }
            "prod" if self.eat(b'(') => {
                let n = self.take_while(|c| c.is_ascii_digit()).to_string();
                let Ok(n) = n.parse() else {
                    return self.fail("expected an n-product index");
                };
                self.expect(b',')?;
                let a = self.sum()?;
                self.expect(b',')?;
                let b = self.sum()?;
                self.expect(b')')?;
                Ok(Expr::Prod(n, Box::new(a), Box::new(b)))
            }
            w if w.as_bytes()[0].is_ascii_digit() => {
                self.pos = start;
                self.fail(format!("unexpected `{w}`; scalars are written `c:<rational>*e`"))
            }
            _ => Ok(Expr::Gen(word)),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < text.len() {
        return p.fail("trailing input");
    }
    Ok(e)
}

impl Expr {
    /// Generator names used, in order of appearance.
    pub fn gens(&self) -> Vec<&str> {
        match self {
            Expr::Gen(g) => vec![g.as_str()],
            Expr::Prod(_, a, b) => [a.gens(), b.gens()].concat(),
            Expr::D(e) | Expr::Scale(_, e) => e.gens(),
            Expr::Sum(es) => es.iter().flat_map(|e| e.gens()).collect(),
        }
    }

    /// The element of the envelope, reduced after every product.
    pub fn eval(&self, env: &Envelope) -> CoreResult<OpPoly> {
        Ok(match self {
            Expr::Gen(g) => env.gen(env.gens().lookup(g)?),
            Expr::Prod(n, a, b) => env.n_product(&a.eval(env)?, *n, &b.eval(env)?)?,
            Expr::D(e) => env.apply_d(&e.eval(env)?),
            Expr::Scale(c, e) => poly_scale(&e.eval(env)?, c),
            Expr::Sum(es) => {
                let mut acc = OpPoly::new();
                for e in es {
                    poly_add_all(&mut acc, &e.eval(env)?, &Rational::one());
                }
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use confenv_core::poly::rat;

    fn g(s: &str) -> Box<Expr> {
        Box::new(Expr::Gen(s.into()))
    }

    #[test]
    fn grammar() {
        assert_eq!(
            parse_expr("prod(2, v, prod(2, v, v))").unwrap(),
            Expr::Prod(2, g("v"), Box::new(Expr::Prod(2, g("v"), g("v"))))
        );
        assert_eq!(
            parse_expr("c:-1/2*d(g) + v").unwrap(),
            Expr::Sum(vec![Expr::Scale(rat(-1, 2), Box::new(Expr::D(g("g")))), Expr::Gen("v".into())])
        );
        assert_eq!(parse_expr(" ( v ) ").unwrap(), Expr::Gen("v".into()));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_expr("prod(2, v v)").unwrap_err().pos, 10);
        assert!(parse_expr("2*v").is_err());
        assert!(parse_expr("c:x*v").is_err());
        assert!(parse_expr("v +").is_err());
        assert!(parse_expr("v)").is_err());
    }
}
