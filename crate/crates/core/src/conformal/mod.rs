//! Presented conformal (super)algebras: generators, multiplication tables and
//! the λ-calculus obtained from them by sesquilinearity.

mod algebras;
mod axioms;
mod poisson;

pub use algebras::*;
pub use axioms::*;
pub use poisson::*;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{d, factorial, lam, ExactPoly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeneratorSet {
    names: Vec<String>,
    odd: Vec<bool>,
}

impl GeneratorSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Self {
        let mut g = Self::new();
        for n in names {
            g.push(n.as_ref(), false).expect("distinct generator names");
        }
        g
    }

    pub fn push(&mut self, name: &str, odd: bool) -> Result<usize> {
        if self.index(name).is_some() {
            return Err(Error::Invalid(format!("generator `{name}` declared twice")));
        }
        self.names.push(name.to_string());
        self.odd.push(odd);
        Ok(self.names.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }
}

/// `N(a, b)`: a default value plus per-pair overrides, keyed by generator index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalityFn {
    pub default: u32,
    pub overrides: BTreeMap<(usize, usize), u32>,
}

impl LocalityFn {
    pub fn constant(n: u32) -> Self {
        Self {
            default: n,
            overrides: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, a: usize, b: usize, n: u32) {
        self.overrides.insert((a, b), n);
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.overrides.get(&(a, b)).copied().unwrap_or(self.default)
    }

    pub fn max(&self) -> u32 {
        self.overrides.values().copied().fold(self.default, u32::max)
    }
}

/// `Σ p_a · a` with `p_a` a polynomial: in `∂` alone for an element of the free
/// H-module, and additionally in `λ`, `μ` for λ-products.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HElement {
    terms: BTreeMap<usize, ExactPoly>,
}

/// A λ-product value: the same representation with `λ`/`μ` allowed in coefficients.
pub type LambdaElement = HElement;

impl HElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn gen(a: usize) -> Self {
        Self::term(a, ExactPoly::one())
    }

    pub fn term(a: usize, p: ExactPoly) -> Self {
        let mut e = Self::zero();
        e.add_term(a, &p);
        e
    }

    /// `∂^s a`
    pub fn dpow(a: usize, s: u32) -> Self {
        Self::term(a, ExactPoly::var_pow(Var::D, s))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &ExactPoly)> {
        self.terms.iter().map(|(a, p)| (*a, p))
    }

    pub fn coeff(&self, a: usize) -> ExactPoly {
        self.terms.get(&a).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, a: usize, p: &ExactPoly) {
        if p.is_zero() {
            return;
        }
        let slot = self.terms.entry(a).or_default();
        *slot += p;
        if slot.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn add(&self, other: &HElement) -> HElement {
        let mut out = self.clone();
        for (a, p) in &other.terms {
            out.add_term(*a, p);
        }
        out
    }

    pub fn sub(&self, other: &HElement) -> HElement {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> HElement {
        self.mul_poly(&ExactPoly::constant(c.clone()))
    }

    pub fn mul_poly(&self, p: &ExactPoly) -> HElement {
        let mut out = HElement::zero();
        for (a, q) in &self.terms {
            out.add_term(*a, &(q * p));
        }
        out
    }

    pub fn map_polys(&self, f: impl Fn(&ExactPoly) -> ExactPoly) -> HElement {
        let mut out = HElement::zero();
        for (a, q) in &self.terms {
            out.add_term(*a, &f(q));
        }
        out
    }

    pub fn substitute(&self, var: Var, repl: &ExactPoly) -> HElement {
        self.map_polys(|q| q.substitute(var, repl))
    }

    /// Divided-power coefficient extraction applied to every generator slot.
    pub fn coefficient_of(&self, var: Var, k: u32, divided: bool) -> HElement {
        self.map_polys(|q| q.coefficient_of(var, k, divided))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.values().map(|p| p.degree_in(v)).max().unwrap_or(0)
    }

    /// `Some(odd)` when every generator in the support has the same parity.
    pub fn parity(&self, gens: &GeneratorSet) -> Option<bool> {
        let mut it = self.terms.keys().map(|a| gens.is_odd(*a));
        let first = it.next().unwrap_or(false);
        it.all(|p| p == first).then_some(first)
    }

    pub fn render(&self, gens: &GeneratorSet) -> String {
        render_combination(self.terms.iter().map(|(a, p)| (gens.name(*a).to_string(), p)))
    }
}

/// `(p) name + (q) name2 + ...`, omitting unit coefficients.
pub fn render_combination<'a>(items: impl Iterator<Item = (String, &'a ExactPoly)>) -> String {
    let mut out = String::new();
    for (name, p) in items {
        if !out.is_empty() {
            out.push_str(" + ");
        }
        if p.is_one() {
            out.push_str(&name);
        } else {
            let _ = write!(out, "({p}) {name}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl ExactPoly {
    pub fn is_one(&self) -> bool {
        *self == ExactPoly::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Lie,
    Associative,
    Commutative,
    Poisson,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Lie => "lie",
            Kind::Associative => "assoc",
            Kind::Commutative => "comm",
            Kind::Poisson => "poisson",
        }
    }

    pub fn has_bracket(self) -> bool {
        matches!(self, Kind::Lie | Kind::Poisson)
    }

    pub fn has_product(self) -> bool {
        !matches!(self, Kind::Lie)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    Bracket,
    Product,
}

/// Generating polynomials `[a λ b] = Σ_c T_c(∂, λ) c` per generator pair.
pub type Table = BTreeMap<(usize, usize), HElement>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalAlgebraDesc {
    pub name: String,
    pub gens: GeneratorSet,
    pub kind: Kind,
    pub bracket: Table,
    pub product: Table,
    /// Envelope locality; defaults to the table support.
    pub locality: LocalityFn,
    /// Absent table entries are unknown rather than zero (truncated models).
    pub partial: bool,
}

impl ConformalAlgebraDesc {
    pub fn new(name: &str, gens: GeneratorSet, kind: Kind) -> Self {
        Self {
            name: name.to_string(),
            gens,
            kind,
            bracket: Table::new(),
            product: Table::new(),
            locality: LocalityFn::default(),
            partial: false,
        }
    }

    fn table(&self, which: Which) -> Result<&Table> {
        let ok = match which {
            Which::Bracket => self.kind.has_bracket(),
            Which::Product => self.kind.has_product(),
        };
        if !ok {
            return Err(Error::WrongKind {
                op: match which {
                    Which::Bracket => "bracket",
                    Which::Product => "product",
                },
                kind: self.kind.keyword().to_string(),
            });
        }
        Ok(match which {
            Which::Bracket => &self.bracket,
            Which::Product => &self.product,
        })
    }

    fn table_mut(&mut self, which: Which) -> &mut Table {
        match which {
            Which::Bracket => &mut self.bracket,
            Which::Product => &mut self.product,
        }
    }

    /// Sets the whole generating polynomial of a pair.
    pub fn set_entry(&mut self, which: Which, a: usize, b: usize, value: HElement) {
        self.table_mut(which).insert((a, b), value);
    }

    /// Adds `λ^(n) · value` to the pair's entry, i.e. declares `a_(n) b += value`.
    pub fn add_nth(&mut self, which: Which, a: usize, b: usize, n: u32, value: &HElement) {
        let scale = lam().pow(n).scale(&(Rational::one() / factorial(n)));
        let entry = self.table_mut(which).entry((a, b)).or_default();
        *entry = entry.add(&value.mul_poly(&scale));
    }

    pub fn entry(&self, which: Which, a: usize, b: usize) -> Result<HElement> {
        let t = self.table(which)?;
        match t.get(&(a, b)) {
            Some(e) => Ok(e.clone()),
            None if self.partial => Err(Error::MissingEntry(
                self.gens.name(a).to_string(),
                self.gens.name(b).to_string(),
            )),
            None => Ok(HElement::zero()),
        }
    }

    pub fn is_odd(&self, a: usize) -> bool {
        self.gens.is_odd(a)
    }

    pub fn sign(&self, x: &HElement, y: &HElement) -> Rational {
        let px = x.parity(&self.gens).unwrap_or(false);
        let py = y.parity(&self.gens).unwrap_or(false);
        crate::poly::sign(px && py)
    }

    /// Locality intrinsic to the tables: one more than the top λ-degree.
    pub fn table_locality(&self, a: usize, b: usize) -> u32 {
        let mut n = 0;
        for t in [&self.bracket, &self.product] {
            if let Some(e) = t.get(&(a, b)) {
                if !e.is_zero() {
                    n = n.max(e.degree_in(Var::L) + 1);
                }
            }
        }
        n
    }

    /// Checks that no entry has an n-product at or above the declared locality.
    pub fn check_locality(&self) -> Result<()> {
        for a in 0..self.gens.len() {
            for b in 0..self.gens.len() {
                if self.table_locality(a, b) > self.locality.get(a, b) {
                    return Err(Error::Invalid(format!(
                        "table entry for ({}, {}) is nonzero at n >= N = {}",
                        self.gens.name(a),
                        self.gens.name(b),
                        self.locality.get(a, b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sets the locality to the table support (at least 1 on nonzero pairs).
    pub fn locality_from_table(&mut self) {
        let mut loc = LocalityFn::constant(0);
        for a in 0..self.gens.len() {
            for b in 0..self.gens.len() {
                let n = self.table_locality(a, b);
                if n > 0 {
                    loc.set(a, b, n);
                }
            }
        }
        self.locality = loc;
    }

    /// `(u_ν v)` for an arbitrary polynomial `ν`; `ν` may involve `∂`, which then
    /// acts on the result (the conjugate uses `ν = −∂−λ`).
    pub fn product_at(
        &self,
        which: Which,
        u: &HElement,
        v: &HElement,
        nu: &ExactPoly,
    ) -> Result<HElement> {
        let minus_nu = -nu;
        let shifted = &d() + nu;
        let mut out = HElement::zero();
        for (a, pa) in u.terms() {
            let left = pa.substitute(Var::D, &minus_nu);
            for (b, pb) in v.terms() {
                let t = self.entry(which, a, b)?;
                if t.is_zero() {
                    continue;
                }
                let scal = &left * &pb.substitute(Var::D, &shifted);
                for (c, tc) in t.terms() {
                    out.add_term(c, &(&scal * &tc.substitute(Var::L, nu)));
                }
            }
        }
        Ok(out)
    }

    pub fn lambda_product(&self, u: &HElement, v: &HElement, which: Which) -> Result<HElement> {
        self.product_at(which, u, v, &lam())
    }

    pub fn nth_product(&self, u: &HElement, v: &HElement, n: u32, which: Which) -> Result<HElement> {
        Ok(self
            .lambda_product(u, v, which)?
            .coefficient_of(Var::L, n, true))
    }

    /// `{u λ v} = (u_{−∂−λ} v)` by direct substitution.
    pub fn conjugate(&self, u: &HElement, v: &HElement, which: Which) -> Result<HElement> {
        self.product_at(which, u, v, &(-&d() - lam()))
    }

    /// The same conjugate assembled from `{u_(n) v} = Σ_s (−1)^{n+s} ∂^(s) (u_(n+s) v)`.
    pub fn conjugate_by_sum(&self, u: &HElement, v: &HElement, which: Which) -> Result<HElement> {
        let full = self.lambda_product(u, v, which)?;
        let top = full.degree_in(Var::L);
        let nth: Vec<HElement> = (0..=top)
            .map(|k| full.coefficient_of(Var::L, k, true))
            .collect();
        let mut out = HElement::zero();
        for n in 0..=top {
            let mut curly = HElement::zero();
            for s in 0..=(top - n) {
                let c = crate::poly::sign((n + s) % 2 == 1) / factorial(s);
                curly = curly.add(&nth[(n + s) as usize].mul_poly(&d().pow(s)).scale(&c));
            }
            out = out.add(&curly.mul_poly(&lam().pow(n).scale(&(Rational::one() / factorial(n)))));
        }
        Ok(out)
    }

    /// Super commutator of the associative product at `ν`:
    /// `(u_ν v) − (−1)^{|u||v|} (v_{−∂−ν} u)`.
    pub fn commutator_at(&self, u: &HElement, v: &HElement, nu: &ExactPoly) -> Result<HElement> {
        let direct = self.product_at(Which::Product, u, v, nu)?;
        let conj = self.product_at(Which::Product, v, u, &(-&d() - nu))?;
        Ok(direct.sub(&conj.scale(&self.sign(u, v))))
    }
}

/// `C(A)^(−)`: the Lie table `[a λ b] = (a λ b) − (−1)^{|a||b|}{b λ a}`.
pub fn commutator_functor(alg: &ConformalAlgebraDesc) -> Result<ConformalAlgebraDesc> {
    if !matches!(alg.kind, Kind::Associative | Kind::Commutative) {
        return Err(Error::WrongKind {
            op: "commutator_functor",
            kind: alg.kind.keyword().to_string(),
        });
    }
    let mut out = ConformalAlgebraDesc::new(&format!("{}^(-)", alg.name), alg.gens.clone(), Kind::Lie);
    out.partial = alg.partial;
    for a in 0..alg.gens.len() {
        for b in 0..alg.gens.len() {
            let (ea, eb) = (HElement::gen(a), HElement::gen(b));
            match alg.commutator_at(&ea, &eb, &lam()) {
                Ok(v) => {
                    if !v.is_zero() {
                        out.set_entry(Which::Bracket, a, b, v);
                    } else if alg.partial {
                        out.set_entry(Which::Bracket, a, b, HElement::zero());
                    }
                }
                Err(Error::MissingEntry(..)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.locality_from_table();
    Ok(out)
}
