//! Universal associative envelopes `U(L; X, N)` as completed modules over
//! `A(X, L)`, their λ-products, and the ascending filtration by X-degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::conformal::{
    check_axioms, make_neveu_schwarz, make_virasoro, AxiomReport, ConformalAlgebraDesc, GeneratorSet,
    HElement, Kind, LocalityFn, Which,
};
use crate::error::{Error, Result};
use crate::ops::{
    poly_add, poly_add_all, poly_sandwich, poly_scale, word_stats, AlgebraRelations, Bounds, Letter, Mono,
    MonomialOrder, OpPoly, OrderKind,
};
use crate::poly::{binomial, factorial, int, sign, Rational, Var};
use crate::rewrite::{complete, h_to_module, CompletionResult, ModuleRelations, RewriteSystem, Status, DEFAULT_MAX_PASSES};

mod cend2;
mod graded;

pub use cend2::*;
pub use graded::*;

/// `Σ λ^k · c_k` with plain (not divided) powers of `λ`.
pub type LambdaPoly = BTreeMap<u32, OpPoly>;

pub fn lambda_add(p: &mut LambdaPoly, k: u32, q: &OpPoly, c: &Rational) {
    let e = p.entry(k).or_default();
    poly_add_all(e, q, c);
    if e.is_empty() {
        p.remove(&k);
    }
}

fn lambda_sub(a: &LambdaPoly, b: &LambdaPoly, c: &Rational) -> LambdaPoly {
    let mut out = a.clone();
    for (k, q) in b {
        lambda_add(&mut out, *k, q, &-c.clone());
    }
    out
}

#[derive(Default)]
struct ProductMemo(RwLock<HashMap<(Mono, u32, Mono), Arc<OpPoly>>>);

impl fmt::Debug for ProductMemo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ProductMemo")
    }
}

#[derive(Debug)]
pub struct Envelope {
    pub lie: ConformalAlgebraDesc,
    pub locality: LocalityFn,
    pub order: OrderKind,
    pub completion: CompletionResult,
    memo: ProductMemo,
}

/// Completes the module presentation of `U(lie; X, locality)` within `bounds`.
pub fn build_envelope(
    lie: &ConformalAlgebraDesc,
    locality: &LocalityFn,
    order: OrderKind,
    bounds: &Bounds,
) -> Result<Envelope> {
    if lie.kind != Kind::Lie {
        return Err(Error::WrongKind {
            op: "envelope",
            kind: lie.kind.keyword().to_string(),
        });
    }
    let rep = check_axioms(lie, 1);
    if let Some(f) = rep.failures.first() {
        return Err(Error::Invalid(format!("{} is not a Lie conformal algebra: {f}", lie.name)));
    }
    let alg = AlgebraRelations::with_lie(lie, order);
    let rels = ModuleRelations::new(alg, locality.clone());
    let completion = complete(&rels, bounds, DEFAULT_MAX_PASSES)?;
    if completion.status == Status::BoundExceeded {
        return Err(Error::BoundExceeded(format!(
            "completion of U({}) did not close within {} passes",
            lie.name, completion.passes
        )));
    }
    Ok(Envelope {
        lie: lie.clone(),
        locality: locality.clone(),
        order,
        completion,
        memo: ProductMemo::default(),
    })
}

/// `U(Vir; {v}, n)` in the standard order.
pub fn virasoro_envelope(n: u32, bounds: &Bounds) -> Result<Envelope> {
    build_envelope(&make_virasoro(), &LocalityFn::constant(n), OrderKind::Standard, bounds)
}

/// `N(v, v) = 3`, all other pairs 2.
pub fn k1_locality(k1: &ConformalAlgebraDesc) -> Result<LocalityFn> {
    let v = k1.gens.lookup("v")?;
    let mut loc = LocalityFn::constant(2);
    loc.set(v, v, 3);
    Ok(loc)
}

/// `U(K_1; {v, g}, N)` with `L_0, L_1 < ∂ < L_2` ordering.
pub fn k1_envelope(bounds: &Bounds) -> Result<Envelope> {
    let k1 = make_neveu_schwarz();
    build_envelope(&k1, &k1_locality(&k1)?, OrderKind::Shifted, bounds)
}

impl Envelope {
    pub fn system(&self) -> &RewriteSystem {
        &self.completion.system
    }

    pub fn bounds(&self) -> &Bounds {
        &self.completion.bounds
    }

    pub fn monomial_order(&self) -> &MonomialOrder {
        self.completion.system.order()
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.lie.gens
    }

    /// `ι(a)`
    pub fn gen(&self, a: usize) -> OpPoly {
        self.word(&[Letter::Gen(a)])
    }

    /// The unreduced word with coefficient one.
    pub fn word(&self, letters: &[Letter]) -> OpPoly {
        OpPoly::from([(self.monomial_order().key(letters), Rational::one())])
    }

    pub fn reduce(&self, p: OpPoly) -> OpPoly {
        self.system().reduce(p)
    }

    pub fn render(&self, p: &OpPoly) -> String {
        self.system().render(p)
    }

    pub fn degree(&self, m: &Mono) -> u32 {
        word_stats(self.monomial_order(), m).deg
    }

    pub fn max_degree(&self, p: &OpPoly) -> u32 {
        p.keys().map(|m| self.degree(m)).max().unwrap_or(0)
    }

    fn max_dpow(&self, p: &OpPoly) -> u32 {
        p.keys().map(|m| word_stats(self.monomial_order(), m).dpow).max().unwrap_or(0)
    }

    /// Normal forms are trusted up to the completion's X-degree; in orders where
    /// `∂` is not the smallest letter the `∂`-power is bounded as well.
    fn check_normal(&self, p: &OpPoly, what: &str) -> Result<()> {
        let b = self.bounds();
        let deg = self.max_degree(p);
        if deg > b.deg {
            return Err(Error::BoundExceeded(format!("{what} has X-degree {deg} > {}", b.deg)));
        }
        if self.order != OrderKind::Standard {
            let s = self.max_dpow(p);
            if s > b.dpow {
                return Err(Error::BoundExceeded(format!("{what} has d-power {s} > {}", b.dpow)));
            }
        }
        Ok(())
    }

    pub fn normal_form(&self, p: &OpPoly) -> Result<OpPoly> {
        if let Some(m) = p.keys().find(|m| !m.is_module()) {
            return Err(Error::Invalid(format!(
                "`{}` is not an element of the envelope",
                self.monomial_order().render_word(m, self.gens())
            )));
        }
        self.check_normal(p, "input")?;
        let nf = self.reduce(p.clone());
        self.check_normal(&nf, "normal form")?;
        Ok(nf)
    }

    pub fn apply_d(&self, p: &OpPoly) -> OpPoly {
        let d = self.monomial_order().rank(Letter::D);
        self.reduce(poly_sandwich(&[d], p, &[]))
    }

    pub fn apply_d_pow(&self, p: &OpPoly, k: u32) -> OpPoly {
        (0..k).fold(p.clone(), |acc, _| self.apply_d(&acc))
    }

    /// Parity of an element, `None` when it mixes parities.
    pub fn parity(&self, p: &OpPoly) -> Option<bool> {
        let mut seen = None;
        for m in p.keys() {
            let odd = self
                .monomial_order()
                .word(m)
                .iter()
                .filter(|l| match l {
                    Letter::L(_, a) | Letter::R(_, a) | Letter::Gen(a) => self.gens().is_odd(*a),
                    Letter::D => false,
                })
                .count()
                % 2
                == 1;
            match seen {
                None => seen = Some(odd),
                Some(s) if s != odd => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(false))
    }

    /// `z_(n) u` for reduced words.
    fn word_product(&self, z: &[u32], n: u32, u: &Mono) -> Arc<OpPoly> {
        let key = (Mono::from_ranks(z), n, u.clone());
        if let Some(r) = self.memo.0.read().expect("memo lock").get(&key) {
            return r.clone();
        }
        let ord = self.monomial_order();
        let rest = &z[1..];
        let out = match ord.letter(z[0]) {
            Letter::Gen(c) => {
                let l = ord.rank(Letter::L(n, c));
                self.reduce(OpPoly::from([(Mono::splice(&[l], u.ranks(), &[]), Rational::one())]))
            }
            // (∂z)_(n) u = −n z_(n−1) u
            Letter::D if n == 0 => OpPoly::new(),
            Letter::D => poly_scale(&self.word_product(rest, n - 1, u), &int(-(n as i64))),
            // (a_(s) z)_(n) u = Σ_j (−1)^j C(s, j) a_(s−j) (z_(n+j) u)
            Letter::L(s, a) => {
                let mut acc = OpPoly::new();
                for j in 0..=s {
                    let inner = self.word_product(rest, n + j, u);
                    if inner.is_empty() {
                        continue;
                    }
                    let l = ord.rank(Letter::L(s - j, a));
                    let c = sign(j % 2 == 1) * binomial(s as i64, j as i64);
                    poly_add_all(&mut acc, &self.reduce(poly_sandwich(&[l], &inner, &[])), &c);
                }
                acc
            }
            Letter::R(..) => unreachable!("normal forms carry no R letters"),
        };
        let out = Arc::new(out);
        self.memo.0.write().expect("memo lock").insert(key, out.clone());
        out
    }

    /// `n` with `z_(k) u = 0` for all `k ≥ n`: each generator of `u` adds at
    /// most the largest locality, each `∂` one more.
    fn locality_bound(&self, z: &OpPoly, u: &OpPoly) -> u32 {
        let nmax = self.locality.max();
        let ord = self.monomial_order();
        let zs = z.keys().map(|m| word_stats(ord, m).dpow).max().unwrap_or(0);
        let us = u
            .keys()
            .map(|m| {
                let s = word_stats(ord, m);
                s.deg * nmax + s.dpow
            })
            .max()
            .unwrap_or(0);
        zs + us
    }

    fn prepare(&self, z: &OpPoly, u: &OpPoly) -> Result<(OpPoly, OpPoly)> {
        let z = self.normal_form(z)?;
        let u = self.normal_form(u)?;
        let total = self.max_degree(&z) + self.max_degree(&u);
        if total > self.bounds().deg {
            return Err(Error::BoundExceeded(format!(
                "product of X-degree {total} exceeds the completion bound {}",
                self.bounds().deg
            )));
        }
        Ok((z, u))
    }

    fn n_product_reduced(&self, z: &OpPoly, n: u32, u: &OpPoly) -> OpPoly {
        let mut out = OpPoly::new();
        for (zw, zc) in z {
            for (uw, uc) in u {
                poly_add_all(&mut out, &self.word_product(zw.ranks(), n, uw), &(zc * uc));
            }
        }
        out
    }

    pub fn n_product(&self, z: &OpPoly, n: u32, u: &OpPoly) -> Result<OpPoly> {
        let (z, u) = self.prepare(z, u)?;
        let out = self.n_product_reduced(&z, n, &u);
        self.check_normal(&out, "product")?;
        Ok(out)
    }

    /// `(z λ u) = Σ_n λ^(n) z_(n) u`.
    pub fn lambda_product(&self, z: &OpPoly, u: &OpPoly) -> Result<LambdaPoly> {
        let (z, u) = self.prepare(z, u)?;
        let mut out = LambdaPoly::new();
        for n in 0..self.locality_bound(&z, &u) {
            let p = self.n_product_reduced(&z, n, &u);
            self.check_normal(&p, "product")?;
            lambda_add(&mut out, n, &p, &(Rational::one() / factorial(n)));
        }
        Ok(out)
    }

    /// `{z λ u} = Σ_n (−∂−λ)^(n) z_(n) u`.
    pub fn conjugate(&self, z: &OpPoly, u: &OpPoly) -> Result<LambdaPoly> {
        let (z, u) = self.prepare(z, u)?;
        let mut out = LambdaPoly::new();
        for n in 0..self.locality_bound(&z, &u) {
            let p = self.n_product_reduced(&z, n, &u);
            if p.is_empty() {
                continue;
            }
            let scale = sign(n % 2 == 1) / factorial(n);
            let mut dk = p;
            for k in 0..=n {
                if k > 0 {
                    dk = self.apply_d(&dk);
                }
                self.check_normal(&dk, "conjugate")?;
                lambda_add(&mut out, n - k, &dk, &(&scale * binomial(n as i64, k as i64)));
            }
        }
        Ok(out)
    }

    /// `(z λ u) − (−1)^{|z||u|} {u λ z}`.
    pub fn commutator(&self, z: &OpPoly, u: &OpPoly) -> Result<LambdaPoly> {
        let odd = self.parity(z).unwrap_or(false) && self.parity(u).unwrap_or(false);
        let direct = self.lambda_product(z, u)?;
        let conj = self.conjugate(u, z)?;
        Ok(lambda_sub(&direct, &conj, &sign(odd)))
    }

    /// A λ-element of the Lie algebra as a λ-polynomial of envelope elements.
    pub fn embed_lambda(&self, e: &HElement) -> LambdaPoly {
        let mut out = LambdaPoly::new();
        for k in 0..=e.degree_in(Var::L) {
            let c = e.coefficient_of(Var::L, k, false);
            let p = self.reduce(h_to_module(self.monomial_order(), &c));
            lambda_add(&mut out, k, &p, &Rational::one());
        }
        out
    }

    /// `ι(a) λ ι(b) − (−1)^{|a||b|} {ι(b) λ ι(a)} = ι([a λ b])` on every
    /// generator pair.
    pub fn check_homomorphism(&self) -> AxiomReport {
        let mut rep = AxiomReport::default();
        for a in 0..self.gens().len() {
            for b in 0..self.gens().len() {
                let name = || format!("homomorphism({}, {})", self.gens().name(a), self.gens().name(b));
                let lhs = match self.commutator(&self.gen(a), &self.gen(b)) {
                    Ok(l) => l,
                    Err(e) => {
                        rep.failures.push(format!("{}: {e}", name()));
                        continue;
                    }
                };
                let br = self
                    .lie
                    .lambda_product(&HElement::gen(a), &HElement::gen(b), Which::Bracket)
                    .map(|e| self.embed_lambda(&e));
                match br {
                    Ok(rhs) if rhs == lhs => rep.checked += 1,
                    Ok(rhs) => rep.failures.push(format!(
                        "{}: {} != {}",
                        name(),
                        self.render_lambda(&lhs),
                        self.render_lambda(&rhs)
                    )),
                    Err(e) => rep.failures.push(format!("{}: {e}", name())),
                }
            }
        }
        rep
    }

    pub fn render_lambda(&self, p: &LambdaPoly) -> String {
        if p.is_empty() {
            return "0".into();
        }
        p.iter()
            .map(|(k, q)| match k {
                0 => format!("({})", self.render(q)),
                1 => format!("l ({})", self.render(q)),
                k => format!("l^{k} ({})", self.render(q)),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// An envelope element with its homogeneous components by X-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredElement {
    pub element: OpPoly,
    pub components: BTreeMap<u32, OpPoly>,
}

impl FilteredElement {
    pub fn new(env: &Envelope, element: OpPoly) -> Self {
        let mut components: BTreeMap<u32, OpPoly> = BTreeMap::new();
        for (m, c) in &element {
            poly_add(components.entry(env.degree(m)).or_default(), m.clone(), c.clone());
        }
        Self { element, components }
    }

    /// Filtration degree: the largest X-degree present.
    pub fn degree(&self) -> Option<u32> {
        self.components.keys().next_back().copied()
    }

    pub fn component(&self, d: u32) -> OpPoly {
        self.components.get(&d).cloned().unwrap_or_default()
    }
}

/// Degree-`d` part of every λ-coefficient.
pub fn lambda_component(env: &Envelope, p: &LambdaPoly, d: u32) -> LambdaPoly {
    let mut out = LambdaPoly::new();
    for (k, q) in p {
        let part: OpPoly = q
            .iter()
            .filter(|(m, _)| env.degree(m) == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        if !part.is_empty() {
            out.insert(*k, part);
        }
    }
    out
}

fn lambda_max_degree(env: &Envelope, p: &LambdaPoly) -> u32 {
    p.values().map(|q| env.max_degree(q)).max().unwrap_or(0)
}

/// Top-degree parts of the product and the commutator of two homogeneous
/// representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedProduct {
    /// Degree `n + m` part of `(u λ v)`.
    pub comm: LambdaPoly,
    /// Degree `n + m − 1` part of `(u λ v) − (−1)^{|u||v|} {v λ u}`.
    pub bracket: LambdaPoly,
}

pub fn graded_products(env: &Envelope, u: &OpPoly, n: u32, v: &OpPoly, m: u32) -> Result<GradedProduct> {
    for (x, k) in [(u, n), (v, m)] {
        let f = FilteredElement::new(env, env.reduce(x.clone()));
        if f.degree() != Some(k) {
            return Err(Error::Invalid(format!(
                "`{}` does not have filtration degree {k}",
                env.render(x)
            )));
        }
    }
    let prod = env.lambda_product(u, v)?;
    let top = lambda_max_degree(env, &prod);
    if top > n + m {
        return Err(Error::Invalid(format!("product has X-degree {top} > {}", n + m)));
    }
    let comm = lambda_component(env, &prod, n + m);
    let commutator = env.commutator(u, v)?;
    let lead = lambda_component(env, &commutator, n + m);
    if !lead.is_empty() {
        return Err(Error::Invalid(format!(
            "commutator keeps degree {}: {}",
            n + m,
            env.render_lambda(&lead)
        )));
    }
    let bracket = if n + m == 0 {
        LambdaPoly::new()
    } else {
        lambda_component(env, &commutator, n + m - 1)
    };
    Ok(GradedProduct { comm, bracket })
}

/// Zero in every coefficient.
pub fn lambda_is_zero(p: &LambdaPoly) -> bool {
    p.values().all(|q| q.values().all(|c| c.is_zero()))
}
