//! Words in `∂`, `L_n^a`, `R_n^a` (and a trailing module generator), monomial
//! orders on them, and the algebras `A(X)`, `A(X, L)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::conformal::{ConformalAlgebraDesc, GeneratorSet, Which};
use crate::error::{Error, Result};
use crate::poly::{binomial, fmt_rational, int, sign, Rational, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    D,
    L(u32, usize),
    R(u32, usize),
    /// Module generator; only ever the last letter of a word.
    Gen(usize),
}

impl Letter {
    pub fn index(self) -> Option<u32> {
        match self {
            Letter::L(n, _) | Letter::R(n, _) => Some(n),
            _ => None,
        }
    }

    pub fn render(self, gens: &GeneratorSet) -> String {
        match self {
            Letter::D => "d".into(),
            Letter::L(n, a) => format!("L{n}^{}", gens.name(a)),
            Letter::R(n, a) => format!("R{n}^{}", gens.name(a)),
            Letter::Gen(a) => gens.name(a).to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    /// R-degree, then length, then lex with `∂ < L < R`, `L_n^a < L_m^b` iff `(n, a) < (m, b)`.
    Standard,
    /// As `Standard` but with `L_0^*, L_1^* < ∂ < L_2^* < ...`.
    Shifted,
}

impl OrderKind {
    pub fn keyword(self) -> &'static str {
        match self {
            OrderKind::Standard => "std",
            OrderKind::Shifted => "sec5",
        }
    }
}

const R_BASE: u32 = 1 << 29;
const GEN_BASE: u32 = 1 << 30;

/// A word encoded as its order key: `[R-degree, length, rank(letter)...]`.
/// Comparing keys lexicographically is comparing words in the monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(Vec<u32>);

impl Mono {
    pub fn from_ranks(ranks: &[u32]) -> Mono {
        let rdeg = ranks.iter().filter(|&&r| (R_BASE..GEN_BASE).contains(&r)).count() as u32;
        let mut v = Vec::with_capacity(ranks.len() + 2);
        v.push(rdeg);
        v.push(ranks.len() as u32);
        v.extend_from_slice(ranks);
        Mono(v)
    }

    pub fn ranks(&self) -> &[u32] {
        &self.0[2..]
    }

    pub fn len(&self) -> usize {
        self.0.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn r_degree(&self) -> u32 {
        self.0[0]
    }

    /// `prefix · self[from..]` style splicing: `a ++ mid ++ b`.
    pub fn splice(a: &[u32], mid: &[u32], b: &[u32]) -> Mono {
        let mut r = Vec::with_capacity(a.len() + mid.len() + b.len());
        r.extend_from_slice(a);
        r.extend_from_slice(mid);
        r.extend_from_slice(b);
        Mono::from_ranks(&r)
    }

    pub fn is_module(&self) -> bool {
        self.ranks().last().is_some_and(|&r| r >= GEN_BASE)
    }
}

/// A `ℚ`-combination of words, kept sorted by the monomial order.
pub type OpPoly = BTreeMap<Mono, Rational>;

pub fn poly_add(p: &mut OpPoly, m: Mono, c: Rational) {
    if c.is_zero() {
        return;
    }
    match p.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub fn poly_add_all(p: &mut OpPoly, q: &OpPoly, c: &Rational) {
    for (m, x) in q {
        poly_add(p, m.clone(), x * c);
    }
}

pub fn poly_scale(p: &OpPoly, c: &Rational) -> OpPoly {
    p.iter().map(|(m, x)| (m.clone(), x * c)).collect()
}

/// `a · p · b` for rank slices `a`, `b`.
pub fn poly_sandwich(a: &[u32], p: &OpPoly, b: &[u32]) -> OpPoly {
    p.iter()
        .map(|(m, c)| (Mono::splice(a, m.ranks(), b), c.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub ngens: usize,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, ngens: usize) -> Self {
        Self { kind, ngens }
    }

    pub fn rank(&self, l: Letter) -> u32 {
        let g = self.ngens as u32;
        match l {
            Letter::D => match self.kind {
                OrderKind::Standard => 1,
                OrderKind::Shifted => 3 + 4 * g,
            },
            Letter::L(n, a) => 4 + 2 * (n * g + a as u32),
            Letter::R(n, a) => R_BASE + n * g + a as u32,
            Letter::Gen(a) => GEN_BASE + a as u32,
        }
    }

    pub fn letter(&self, r: u32) -> Letter {
        let g = self.ngens as u32;
        if r >= GEN_BASE {
            Letter::Gen((r - GEN_BASE) as usize)
        } else if r >= R_BASE {
            let k = r - R_BASE;
            Letter::R(k / g, (k % g) as usize)
        } else if r.is_multiple_of(2) && r >= 4 {
            let k = (r - 4) / 2;
            Letter::L(k / g, (k % g) as usize)
        } else {
            Letter::D
        }
    }

    pub fn key(&self, w: &[Letter]) -> Mono {
        let ranks: Vec<u32> = w.iter().map(|l| self.rank(*l)).collect();
        Mono::from_ranks(&ranks)
    }

    pub fn word(&self, m: &Mono) -> Vec<Letter> {
        m.ranks().iter().map(|r| self.letter(*r)).collect()
    }

    pub fn compare(&self, u: &[Letter], v: &[Letter]) -> Ordering {
        self.key(u).cmp(&self.key(v))
    }

    pub fn render_word(&self, m: &Mono, gens: &GeneratorSet) -> String {
        let w = self.word(m);
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            if w[i] == Letter::D {
                let mut k = 0;
                while i < w.len() && w[i] == Letter::D {
                    k += 1;
                    i += 1;
                }
                parts.push(if k == 1 { "d".into() } else { format!("d^{k}") });
            } else {
                parts.push(w[i].render(gens));
                i += 1;
            }
        }
        parts.join(" ")
    }

    pub fn render_poly(&self, p: &OpPoly, gens: &GeneratorSet) -> String {
        if p.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in p.iter().rev().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !abs.is_one() {
                out.push_str(&fmt_rational(&abs));
                out.push(' ');
            }
            out.push_str(&self.render_word(m, gens));
        }
        out
    }
}

/// Instantiation bounds for rule schemas and word enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bounds {
    /// X-degree (number of `L`/`R` letters plus one for the generator).
    pub deg: u32,
    /// Number of `∂` letters.
    pub dpow: u32,
    /// Largest operator index.
    pub idx: u32,
    /// Word length, for pure algebra words.
    pub len: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            deg: 8,
            dpow: 6,
            idx: 6,
            len: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WordStats {
    pub deg: u32,
    pub dpow: u32,
    pub idx: u32,
    pub len: u32,
}

pub fn word_stats(order: &MonomialOrder, m: &Mono) -> WordStats {
    let mut s = WordStats {
        len: m.len() as u32,
        ..Default::default()
    };
    for l in order.word(m) {
        match l {
            Letter::D => s.dpow += 1,
            Letter::L(n, _) | Letter::R(n, _) => {
                s.deg += 1;
                s.idx = s.idx.max(n);
            }
            Letter::Gen(_) => s.deg += 1,
        }
    }
    s
}

/// `L^{p(∂) c}_j` expanded with `L^{∂x}_j = −j L^x_{j−1}`.
pub fn l_of_element(order: &MonomialOrder, elem: &crate::conformal::HElement, j: u32) -> OpPoly {
    let mut out = OpPoly::new();
    for (c, p) in elem.terms() {
        for (e, coef) in p.terms() {
            let k = e[Var::D as usize];
            if k > j {
                continue;
            }
            let mut f = sign(k % 2 == 1) * coef;
            for i in 0..k {
                f *= int((j - i) as i64);
            }
            poly_add(&mut out, order.key(&[Letter::L(j - k, c)]), f);
        }
    }
    out
}

type PairKey = (u32, u32, bool);

/// Memo of instantiated pair rules; a clone starts empty.
#[derive(Default)]
struct PairCache(RwLock<HashMap<PairKey, Option<Arc<OpPoly>>>>);

impl Clone for PairCache {
    fn clone(&self) -> Self {
        PairCache::default()
    }
}

impl std::fmt::Debug for PairCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PairCache")
    }
}

/// The relation families of `A(X)` and, with a Lie table, of `A(X, L)`.
#[derive(Debug, Clone)]
pub struct AlgebraRelations {
    pub order: MonomialOrder,
    pub gens: GeneratorSet,
    pub lie: Option<ConformalAlgebraDesc>,
    /// Mutation switch: flips the sign of `n L_{n−1}` in `L_n ∂ = ∂ L_n + n L_{n−1}`.
    pub mis_sign: bool,
    cache: PairCache,
}

impl AlgebraRelations {
    pub fn free(gens: GeneratorSet, kind: OrderKind) -> Self {
        let order = MonomialOrder::new(kind, gens.len());
        Self {
            order,
            gens,
            lie: None,
            mis_sign: false,
            cache: PairCache::default(),
        }
    }

    pub fn with_lie(lie: &ConformalAlgebraDesc, kind: OrderKind) -> Self {
        let mut r = Self::free(lie.gens.clone(), kind);
        r.lie = Some(lie.clone());
        r
    }

    fn key(&self, w: &[Letter]) -> Mono {
        self.order.key(w)
    }

    /// The defining relation (as a polynomial equal to zero) involving the pair
    /// `x y` in some order, if any.
    fn relation(&self, x: Letter, y: Letter) -> Option<OpPoly> {
        use Letter::*;
        let mut rel = OpPoly::new();
        let one = Rational::one();
        match (x, y) {
            (L(n, a), D) | (D, L(n, a)) => {
                poly_add(&mut rel, self.key(&[L(n, a), D]), one.clone());
                poly_add(&mut rel, self.key(&[D, L(n, a)]), -one);
                if n > 0 {
                    let c = if self.mis_sign { int(n as i64) } else { -int(n as i64) };
                    poly_add(&mut rel, self.key(&[L(n - 1, a)]), c);
                }
            }
            (R(n, a), D) | (D, R(n, a)) => {
                poly_add(&mut rel, self.key(&[R(n, a), D]), one.clone());
                poly_add(&mut rel, self.key(&[D, R(n, a)]), -one);
                if n > 0 {
                    poly_add(&mut rel, self.key(&[R(n - 1, a)]), -int(n as i64));
                }
            }
            (R(m, b), L(n, a)) | (L(n, a), R(m, b)) => {
                poly_add(&mut rel, self.key(&[R(m, b), L(n, a)]), one.clone());
                poly_add(&mut rel, self.key(&[L(n, a), R(m, b)]), -one);
            }
            (L(n, a), L(m, b)) => {
                let lie = self.lie.as_ref()?;
                let (big, small) = if self.order.rank(x) >= self.order.rank(y) {
                    ((n, a), (m, b))
                } else {
                    ((m, b), (n, a))
                };
                let ((n, a), (m, b)) = (big, small);
                let odd = self.gens.is_odd(a) && self.gens.is_odd(b);
                if (n, a) == (m, b) && !odd {
                    return None;
                }
                poly_add(&mut rel, self.key(&[L(n, a), L(m, b)]), one.clone());
                poly_add(&mut rel, self.key(&[L(m, b), L(n, a)]), -sign(odd));
                let ea = crate::conformal::HElement::gen(a);
                let eb = crate::conformal::HElement::gen(b);
                for s in 0..=n {
                    let br = lie.nth_product(&ea, &eb, s, Which::Bracket).ok()?;
                    if br.is_zero() {
                        continue;
                    }
                    let c = binomial(n as i64, s as i64);
                    poly_add_all(&mut rel, &l_of_element(&self.order, &br, n + m - s), &-c);
                }
            }
            _ => return None,
        }
        Some(rel)
    }

    /// Whether `x y` is the left side of a rule, without building it.
    pub fn has_pair_rule(&self, x: Letter, y: Letter) -> bool {
        use Letter::*;
        let (rx, ry) = (self.order.rank(x), self.order.rank(y));
        match (x, y) {
            (L(..), D) | (D, L(..)) => rx > ry,
            (R(..), D) | (R(..), L(..)) => true,
            (L(_, a), L(..)) => self.lie.is_some() && (rx > ry || (x == y && self.gens.is_odd(a))),
            _ => false,
        }
    }

    /// Right side of the rule whose left side is exactly `x y`, if any.
    pub fn pair_rule(&self, x: Letter, y: Letter) -> Option<Arc<OpPoly>> {
        let key = (self.order.rank(x), self.order.rank(y), self.mis_sign);
        if let Some(r) = self.cache.0.read().expect("cache lock").get(&key) {
            return r.clone();
        }
        let r = self.build_pair_rule(x, y).map(Arc::new);
        self.cache.0.write().expect("cache lock").insert(key, r.clone());
        r
    }

    fn build_pair_rule(&self, x: Letter, y: Letter) -> Option<OpPoly> {
        let rel = self.relation(x, y)?;
        let (lead, c) = rel.iter().next_back()?;
        if *lead != self.key(&[x, y]) {
            return None;
        }
        let inv = -(Rational::one() / c);
        let mut rhs = OpPoly::new();
        for (m, v) in rel.iter() {
            if m != lead {
                poly_add(&mut rhs, m.clone(), v * &inv);
            }
        }
        Some(rhs)
    }

    fn check_input(&self, p: &OpPoly, b: &Bounds) -> Result<()> {
        for m in p.keys() {
            let s = word_stats(&self.order, m);
            if s.idx > b.idx || s.len > b.len {
                return Err(Error::BoundExceeded(format!(
                    "word {} exceeds index {} / length {}",
                    self.order.render_word(m, &self.gens),
                    b.idx,
                    b.len
                )));
            }
        }
        Ok(())
    }

    /// Normal form modulo the pair rules, reducing the leftmost redex of the
    /// largest remaining word. Inputs must lie within `bounds`; rule instances
    /// needed along the way are generated on demand from the schemas.
    pub fn normal_form(&self, p: &OpPoly, bounds: &Bounds) -> Result<OpPoly> {
        self.check_input(p, bounds)?;
        Ok(self.reduce(p.clone(), |_| 0))
    }

    /// Reduction with a choice function picking which redex (by its index among
    /// all redexes of the word) to rewrite; used for strategy-independence tests.
    pub fn reduce(&self, mut work: OpPoly, mut choose: impl FnMut(usize) -> usize) -> OpPoly {
        let mut out = OpPoly::new();
        while let Some((m, c)) = work.pop_last() {
            let r = m.ranks();
            let redexes: Vec<usize> = (0..r.len().saturating_sub(1))
                .filter(|&i| self.has_pair_rule(self.order.letter(r[i]), self.order.letter(r[i + 1])))
                .collect();
            if redexes.is_empty() {
                poly_add(&mut out, m, c);
                continue;
            }
            let i = redexes[choose(redexes.len()) % redexes.len()];
            let rhs = self
                .pair_rule(self.order.letter(r[i]), self.order.letter(r[i + 1]))
                .expect("redex");
            poly_add_all(&mut work, &poly_sandwich(&r[..i], &rhs, &r[i + 2..]), &c);
        }
        out
    }

    pub fn letters(&self, bounds: &Bounds) -> Vec<Letter> {
        let mut v = vec![Letter::D];
        for n in 0..=bounds.idx {
            for a in 0..self.gens.len() {
                v.push(Letter::L(n, a));
                v.push(Letter::R(n, a));
            }
        }
        v
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompositionReport {
    pub checked: usize,
    /// `(critical word, residue)` for every composition that failed to vanish.
    pub residues: Vec<(String, String)>,
}

impl CompositionReport {
    pub fn passed(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Resolves every overlap `x y z` of two rule left sides `x y`, `y z` among
/// letters with index ≤ `bounds.idx` by reducing both sides.
pub fn alg_composition_check(rels: &AlgebraRelations, bounds: &Bounds) -> CompositionReport {
    let letters = rels.letters(bounds);
    let mut rep = CompositionReport::default();
    let ord = &rels.order;
    let mut rules: BTreeMap<(u32, u32), OpPoly> = BTreeMap::new();
    for &x in &letters {
        for &y in &letters {
            if let Some(r) = rels.pair_rule(x, y) {
                rules.insert((ord.rank(x), ord.rank(y)), (*r).clone());
            }
        }
    }
    for (&(x, y), rxy) in &rules {
        for (&(y2, z), ryz) in rules.range((y, 0)..=(y, u32::MAX)) {
            debug_assert_eq!(y, y2);
            if bounds.len < 3 {
                continue;
            }
            let left = poly_sandwich(&[], rxy, &[z]);
            let right = poly_sandwich(&[x], ryz, &[]);
            let mut s = left;
            poly_add_all(&mut s, &right, &-Rational::one());
            let nf = rels.reduce(s, |_| 0);
            rep.checked += 1;
            if !nf.is_empty() {
                let w = Mono::from_ranks(&[x, y, z]);
                rep.residues.push((
                    ord.render_word(&w, &rels.gens),
                    ord.render_poly(&nf, &rels.gens),
                ));
            }
        }
    }
    rep
}
