//! Exact rational arithmetic and sparse polynomials in the formal variables
//! `∂`, `λ`, `μ` and `x`.
//!
//! Everything downstream (λ-products, conformal endomorphisms, graded tables)
//! is expressed with [`ExactPoly`], so its canonical form doubles as the
//! textual contract for golden output.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * int(n - i) / int(i + 1);
    }
    acc
}

pub fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// One of the four formal variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// `∂`, rendered `d`
    D = 0,
    /// `λ`, rendered `l`
    L = 1,
    /// `μ`, rendered `m`
    M = 2,
    /// `x` of the conformal endomorphism realization
    X = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::D, Var::L, Var::M, Var::X];

    pub fn symbol(self) -> &'static str {
        match self {
            Var::D => "d",
            Var::L => "l",
            Var::M => "m",
            Var::X => "x",
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Var> {
        match s {
            "d" => Ok(Var::D),
            "l" => Ok(Var::L),
            "m" => Ok(Var::M),
            "x" => Ok(Var::X),
            other => Err(Error::UnknownVariable(other.to_string())),
        }
    }
}

/// Exponents of `(∂, λ, μ, x)`.
pub type Exponents = [u32; 4];

/// Key used for the canonical printing order: `(deg x, deg ∂, deg λ, deg μ)`.
fn print_key(e: &Exponents) -> [u32; 4] {
    [e[3], e[0], e[1], e[2]]
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactPoly {
    terms: BTreeMap<Exponents, Rational>,
}

impl ExactPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, [0; 4])
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, k: u32) -> Self {
        let mut e = [0; 4];
        e[v as usize] = k;
        Self::monomial(Rational::one(), e)
    }

    pub fn monomial(c: Rational, e: Exponents) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `p^(k) = p^k / k!`
    pub fn divided_pow(&self, k: u32) -> Self {
        self.pow(k).scale(&(Rational::one() / factorial(k)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0; 4])
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&[0; 4]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponents) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v as usize]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|e| e[v as usize] > 0)
    }

    /// Replaces every occurrence of `var` by `repl`.
    pub fn substitute(&self, var: Var, repl: &ExactPoly) -> Self {
        let mut repls: [Option<&ExactPoly>; 4] = [None; 4];
        repls[var as usize] = Some(repl);
        self.substitute_many(&repls)
    }

    /// Simultaneous substitution: variables mapped to `None` are kept.
    pub fn substitute_many(&self, repls: &[Option<&ExactPoly>; 4]) -> Self {
        let mut powers: [Vec<ExactPoly>; 4] = Default::default();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            let mut kept = [0u32; 4];
            for v in 0..4 {
                match repls[v] {
                    Some(r) => {
                        let cache = &mut powers[v];
                        while cache.len() <= e[v] as usize {
                            let next = match cache.last() {
                                None => Self::one(),
                                Some(p) => p * r,
                            };
                            cache.push(next);
                        }
                        term = &term * &cache[e[v] as usize];
                    }
                    None => kept[v] = e[v],
                }
            }
            out += &(&term * &Self::monomial(Rational::one(), kept));
        }
        out
    }

    /// Substitution addressed by variable name, for callers holding user input.
    pub fn substitute_named(&self, var: &str, repl: &ExactPoly) -> Result<Self> {
        Ok(self.substitute(var.parse()?, repl))
    }

    /// Coefficient of `var^k`, or of the divided power `var^(k)` when `divided`
    /// (i.e. `k!` times the plain coefficient).
    pub fn coefficient_of(&self, var: Var, k: u32, divided: bool) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var as usize] == k {
                let mut e2 = *e;
                e2[var as usize] = 0;
                out.add_term(e2, c.clone());
            }
        }
        if divided {
            out.scale(&factorial(k))
        } else {
            out
        }
    }

    pub fn evaluate(&self, point: &[Rational; 4]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..4 {
                for _ in 0..e[v] {
                    t *= &point[v];
                }
            }
            acc += t;
        }
        acc
    }

    /// Terms in canonical printing order.
    pub fn sorted_terms(&self) -> Vec<(Exponents, Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (*e, c.clone())).collect();
        v.sort_by_key(|t| std::cmp::Reverse(print_key(&t.0)));
        v
    }

    /// True when the rendering needs parentheses to be used as a factor.
    pub fn is_single_term(&self) -> bool {
        self.terms.len() <= 1
    }
}

fn fmt_monomial(e: &Exponents) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        match e[v as usize] {
            0 => {}
            1 => parts.push(v.symbol().to_string()),
            k => parts.push(format!("{}^{}", v.symbol(), k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.sorted_terms().iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono = fmt_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly({self})")
    }
}

impl FromStr for ExactPoly {
    type Err = Error;

    /// Parses the canonical rendering (`2*d^2*l - 1/2*x + 3`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let compact: String = s.split_whitespace().collect();
        let mut chunks = Vec::new();
        let mut cur = String::new();
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                chunks.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        if !cur.is_empty() {
            chunks.push(cur);
        }
        for chunk in chunks {
            let (neg, body) = match chunk.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, chunk.strip_prefix('+').unwrap_or(&chunk)),
            };
            let mut coef = Rational::one();
            let mut e = [0u32; 4];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::Invalid(format!("malformed polynomial `{s}`")));
                }
                let first = factor.chars().next().unwrap();
                if first.is_ascii_digit() {
                    coef *= parse_rational(factor)?;
                } else {
                    let (name, k) = match factor.split_once('^') {
                        Some((n, k)) => (
                            n,
                            k.parse::<u32>()
                                .map_err(|_| Error::Invalid(format!("bad exponent in `{s}`")))?,
                        ),
                        None => (factor, 1),
                    };
                    let v: Var = name.parse()?;
                    e[v as usize] += k;
                }
            }
            out.add_term(e, if neg { -coef } else { coef });
        }
        Ok(out)
    }
}

impl AddAssign<&ExactPoly> for ExactPoly {
    fn add_assign(&mut self, rhs: &ExactPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&ExactPoly> for ExactPoly {
    fn sub_assign(&mut self, rhs: &ExactPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        let mut out = ExactPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: ExactPoly) -> ExactPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

macro_rules! forward_mixed {
    ($tr:ident, $m:ident) => {
        impl $tr<&ExactPoly> for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: &ExactPoly) -> ExactPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_mixed!(Add, add);
forward_mixed!(Sub, sub);
forward_mixed!(Mul, mul);

impl Neg for ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        -&self
    }
}

/// Shorthands used throughout the crate.
pub fn d() -> ExactPoly {
    ExactPoly::var(Var::D)
}
pub fn lam() -> ExactPoly {
    ExactPoly::var(Var::L)
}
pub fn mu() -> ExactPoly {
    ExactPoly::var(Var::M)
}
pub fn xv() -> ExactPoly {
    ExactPoly::var(Var::X)
}
pub fn cst(r: Rational) -> ExactPoly {
    ExactPoly::constant(r)
}

/// Converts a small non-negative rational integer to `u32`, if it is one.
pub fn as_small_uint(r: &Rational) -> Option<u32> {
    if r.denom().is_one() && !r.is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ExactPoly {
        s.parse().unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(&(&lam() + &d()) + &(-lam()), d());
        let half_sq = lam().divided_pow(2);
        assert_eq!(&half_sq + &half_sq, lam().pow(2));
        assert_eq!(p("2*d + 3*l") + p("d - l"), p("3*d + 2*l"));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(lam() * (&lam() + &d()), p("d*l + l^2"));
        assert!((p("d + 2*l") * ExactPoly::zero()).is_zero());
        assert_eq!(p("l + d") * p("l - d"), p("l^2 - d^2"));
    }

    #[test]
    fn substitution_examples() {
        let conj = p("-d - l");
        assert_eq!(lam().pow(2).substitute(Var::L, &conj), p("d^2 + 2*d*l + l^2"));
        assert_eq!(mu().substitute(Var::M, &p("m - l")), p("m - l"));
        assert_eq!(p("d + 2*l").substitute(Var::L, &conj), p("-d - 2*l"));
        assert!(matches!(
            lam().substitute_named("q", &d()),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn substitution_is_simultaneous() {
        // d -> -l, x -> x - d - l must not feed the new d back into the first rule
        let f = p("d*x");
        let out = f.substitute_many(&[Some(&p("-l")), None, None, Some(&p("x - d - l"))]);
        assert_eq!(out, p("-l*x + d*l + l^2"));
    }

    #[test]
    fn coefficient_examples() {
        let vir = p("d + 2*l");
        assert_eq!(vir.coefficient_of(Var::L, 1, true), ExactPoly::from_int(2));
        assert_eq!(vir.coefficient_of(Var::L, 0, true), d());
        assert_eq!(lam().pow(2).coefficient_of(Var::L, 2, true), ExactPoly::from_int(2));
    }

    #[test]
    fn rendering_order_and_format() {
        let q = p("x*d + 1/2*l^2 - 3 + d^2 - m");
        assert_eq!(q.to_string(), "d*x + d^2 + 1/2*l^2 - m - 3");
        assert_eq!(p("-d - 2*l").to_string(), "-d - 2*l");
        assert_eq!(ExactPoly::zero().to_string(), "0");
        assert_eq!(p(&q.to_string()), q);
    }
}
