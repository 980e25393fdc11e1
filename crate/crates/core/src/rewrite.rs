//! The free `A(X)`-module on `X`, module-level rewriting and completion.
//!
//! Module words are rank sequences ending in a generator. Besides the algebra
//! pair rules, three schema families act on them:
//!
//! - locality: `L_n^a b → 0` for `n ≥ N(a, b)`;
//! - right multiplication: `R_n^b a → Σ_s (−1)^{n+s} ∂^(s) L_{n+s}^a b`;
//! - extended locality: `L_n^a L_m^b u → Σ_{q≥1} (−1)^{q+1} C(n, q) L_{n−q}^a L_{m+q}^b u`
//!   for `n ≥ N(a, b)` and any module word `u`.
//!
//! Completion adds explicit suffix rules `W c → rhs` until every composition
//! inside the bounds resolves.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use rand::Rng;

use crate::conformal::{GeneratorSet, HElement, LocalityFn, Which};
use crate::error::{Error, Result};
use crate::ops::{
    poly_add, poly_add_all, poly_sandwich, word_stats, AlgebraRelations, Bounds, Letter, Mono,
    MonomialOrder, OpPoly,
};
use crate::poly::{binomial, factorial, sign, Rational, Var};

/// A `ℚ`-combination of module words.
pub type ModElement = OpPoly;

/// Presentation of a module over `A(X)` or `A(X, L)`.
#[derive(Debug, Clone)]
pub struct ModuleRelations {
    pub alg: AlgebraRelations,
    pub locality: LocalityFn,
    /// Additional relations (polynomials equal to zero) in module words.
    pub extra: Vec<OpPoly>,
}

impl ModuleRelations {
    pub fn new(alg: AlgebraRelations, locality: LocalityFn) -> Self {
        Self {
            alg,
            locality,
            extra: Vec::new(),
        }
    }

    /// `R_n^a b − (−1)^{|a||b|} (L_n^a b − [a_(n) b])` for every pair and every
    /// `n` below the larger of both localities and the table support.
    pub fn comm_relations(&self) -> Result<Vec<OpPoly>> {
        let Some(lie) = &self.alg.lie else {
            return Ok(Vec::new());
        };
        let ord = &self.alg.order;
        let mut out = Vec::new();
        for a in 0..self.alg.gens.len() {
            for b in 0..self.alg.gens.len() {
                let top = self
                    .locality
                    .get(a, b)
                    .max(self.locality.get(b, a))
                    .max(lie.table_locality(a, b));
                let s = sign(self.alg.gens.is_odd(a) && self.alg.gens.is_odd(b));
                for n in 0..top {
                    let br = lie.nth_product(&HElement::gen(a), &HElement::gen(b), n, Which::Bracket)?;
                    let mut rel = OpPoly::new();
                    poly_add(&mut rel, ord.key(&[Letter::R(n, a), Letter::Gen(b)]), Rational::one());
                    poly_add(&mut rel, ord.key(&[Letter::L(n, a), Letter::Gen(b)]), -s.clone());
                    poly_add_all(&mut rel, &h_to_module(ord, &br), &s);
                    out.push(rel);
                }
            }
        }
        Ok(out)
    }

    pub fn initial(&self) -> Result<Vec<OpPoly>> {
        let mut v = self.comm_relations()?;
        v.extend(self.extra.iter().cloned());
        Ok(v)
    }
}

/// `Σ p_c(∂) c` as module words `∂^k c`.
pub fn h_to_module(order: &MonomialOrder, e: &HElement) -> OpPoly {
    let mut out = OpPoly::new();
    for (c, p) in e.terms() {
        for (exp, coef) in p.terms() {
            let mut w = vec![Letter::D; exp[Var::D as usize] as usize];
            w.push(Letter::Gen(c));
            poly_add(&mut out, order.key(&w), coef.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Redex {
    Explicit(usize),
    Locality,
    RightMul,
    LocEx(usize),
    Pair(usize),
}

impl Redex {
    fn pos(self, len: usize) -> usize {
        match self {
            Redex::Explicit(i) | Redex::LocEx(i) | Redex::Pair(i) => i,
            Redex::Locality | Redex::RightMul => len - 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    CompleteAtBound,
    BoundExceeded,
}

impl Status {
    pub fn keyword(self) -> &'static str {
        match self {
            Status::CompleteAtBound => "complete-at-bound",
            Status::BoundExceeded => "bound-exceeded",
        }
    }
}

/// Normal forms of single words under the current rules; a clone starts empty.
#[derive(Default)]
struct NfMemo(RwLock<HashMap<Mono, Arc<OpPoly>>>);

impl Clone for NfMemo {
    fn clone(&self) -> Self {
        NfMemo::default()
    }
}

impl std::fmt::Debug for NfMemo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("NfMemo")
    }
}

/// Schemas plus the explicit rules found so far.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    pub alg: AlgebraRelations,
    pub locality: LocalityFn,
    rules: HashMap<Vec<u32>, OpPoly>,
    memo: NfMemo,
}

impl RewriteSystem {
    pub fn new(alg: AlgebraRelations, locality: LocalityFn) -> Self {
        Self {
            alg,
            locality,
            rules: HashMap::new(),
            memo: NfMemo::default(),
        }
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.alg.order
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.alg.gens
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Explicit rules sorted by left side.
    pub fn rules(&self) -> Vec<(Mono, OpPoly)> {
        let mut v: Vec<(Mono, OpPoly)> = self
            .rules
            .iter()
            .map(|(k, r)| (Mono::from_ranks(k), r.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn rule_for(&self, lhs: &Mono) -> Option<&OpPoly> {
        self.rules.get(lhs.ranks())
    }

    fn letter(&self, r: u32) -> Letter {
        self.alg.order.letter(r)
    }

    fn redexes_at(&self, r: &[u32], i: usize, out: &mut Vec<Redex>, first_only: bool) {
        let len = r.len();
        let module = matches!(r.last().map(|&x| self.letter(x)), Some(Letter::Gen(_)));
        let push = |x: Redex, out: &mut Vec<Redex>| {
            out.push(x);
            first_only
        };
        if module && self.rules.contains_key(&r[i..]) && push(Redex::Explicit(i), out) {
            return;
        }
        if i + 1 >= len {
            return;
        }
        let x = self.letter(r[i]);
        let y = self.letter(r[i + 1]);
        if module && i + 2 == len {
            if let Letter::Gen(c) = y {
                match x {
                    Letter::L(n, a) if n >= self.locality.get(a, c) => {
                        if push(Redex::Locality, out) {
                            return;
                        }
                    }
                    Letter::R(..)
                        if push(Redex::RightMul, out) => {
                            return;
                        }
                    _ => {}
                }
            }
            return;
        }
        if let (Letter::L(n, a), Letter::L(_, b)) = (x, y) {
            if module && n >= self.locality.get(a, b) && push(Redex::LocEx(i), out) {
                return;
            }
        }
        if !matches!(y, Letter::Gen(_)) && self.alg.has_pair_rule(x, y) {
            out.push(Redex::Pair(i));
        }
    }

    fn first_redex(&self, r: &[u32]) -> Option<Redex> {
        let mut buf = Vec::with_capacity(1);
        for i in 0..r.len() {
            self.redexes_at(r, i, &mut buf, true);
            if let Some(x) = buf.pop() {
                return Some(x);
            }
        }
        None
    }

    fn all_redexes(&self, r: &[u32]) -> Vec<Redex> {
        let mut buf = Vec::new();
        for i in 0..r.len() {
            self.redexes_at(r, i, &mut buf, false);
        }
        buf
    }

    pub fn is_reducible(&self, m: &Mono) -> bool {
        self.first_redex(m.ranks()).is_some()
    }

    fn apply(&self, r: &[u32], red: Redex) -> OpPoly {
        let ord = &self.alg.order;
        let mut out = OpPoly::new();
        match red {
            Redex::Explicit(i) => {
                out = poly_sandwich(&r[..i], &self.rules[&r[i..]], &[]);
            }
            Redex::Locality => {}
            Redex::RightMul => {
                let i = r.len() - 2;
                let (Letter::R(n, b), Letter::Gen(a)) = (self.letter(r[i]), self.letter(r[i + 1])) else {
                    unreachable!("right multiplication redex");
                };
                let top = self.locality.get(a, b);
                for s in 0..top.saturating_sub(n) {
                    let mut w = vec![ord.rank(Letter::D); s as usize];
                    w.push(ord.rank(Letter::L(n + s, a)));
                    w.push(ord.rank(Letter::Gen(b)));
                    let c = sign((n + s) % 2 == 1) / factorial(s);
                    poly_add(&mut out, Mono::splice(&r[..i], &w, &[]), c);
                }
            }
            Redex::LocEx(i) => {
                let (Letter::L(n, a), Letter::L(m, b)) = (self.letter(r[i]), self.letter(r[i + 1])) else {
                    unreachable!("extended locality redex");
                };
                for q in 1..=n {
                    let w = [ord.rank(Letter::L(n - q, a)), ord.rank(Letter::L(m + q, b))];
                    let c = sign(q % 2 == 0) * binomial(n as i64, q as i64);
                    poly_add(&mut out, Mono::splice(&r[..i], &w, &r[i + 2..]), c);
                }
            }
            Redex::Pair(i) => {
                let rhs = self
                    .alg
                    .pair_rule(self.letter(r[i]), self.letter(r[i + 1]))
                    .expect("pair redex");
                out = poly_sandwich(&r[..i], &rhs, &r[i + 2..]);
            }
        }
        out
    }

    /// Deterministic normal form: each word is rewritten at its leftmost redex,
    /// module rules before algebra rules, and word results are memoized.
    /// No bound checks.
    pub fn reduce(&self, work: OpPoly) -> OpPoly {
        let mut out = OpPoly::new();
        for (m, c) in work {
            poly_add_all(&mut out, &self.word_nf(&m), &c);
        }
        out
    }

    fn word_nf(&self, m: &Mono) -> Arc<OpPoly> {
        if let Some(r) = self.memo.0.read().expect("memo lock").get(m) {
            return r.clone();
        }
        let nf = match self.first_redex(m.ranks()) {
            None => OpPoly::from([(m.clone(), Rational::one())]),
            Some(red) => {
                let mut acc = OpPoly::new();
                for (w, c) in self.apply(m.ranks(), red) {
                    poly_add_all(&mut acc, &self.word_nf(&w), &c);
                }
                acc
            }
        };
        let nf = Arc::new(nf);
        self.memo.0.write().expect("memo lock").insert(m.clone(), nf.clone());
        nf
    }

    fn forget(&mut self) {
        self.memo = NfMemo::default();
    }

    /// Normal form picking a uniformly random redex (any position, any rule)
    /// of a uniformly random remaining word.
    pub fn reduce_random<R: Rng>(&self, mut work: OpPoly, rng: &mut R) -> OpPoly {
        let mut out = OpPoly::new();
        while !work.is_empty() {
            let k = rng.gen_range(0..work.len());
            let m = work.keys().nth(k).cloned().expect("index in range");
            let c = work.remove(&m).expect("present");
            let reds = self.all_redexes(m.ranks());
            if reds.is_empty() {
                poly_add(&mut out, m, c);
                continue;
            }
            let red = reds[rng.gen_range(0..reds.len())];
            poly_add_all(&mut work, &self.apply(m.ranks(), red), &c);
        }
        out
    }

    fn check_bounds(&self, p: &OpPoly, b: &Bounds, what: &str) -> Result<()> {
        for m in p.keys() {
            let s = word_stats(&self.alg.order, m);
            if s.deg > b.deg || s.dpow > b.dpow || s.idx > b.idx {
                return Err(Error::BoundExceeded(format!(
                    "{what} word {} exceeds deg {} / dpow {} / idx {}",
                    self.alg.order.render_word(m, &self.alg.gens),
                    b.deg,
                    b.dpow,
                    b.idx
                )));
            }
        }
        Ok(())
    }

    /// Normal form of an element within `bounds`; fails when the input or any
    /// irreducible word of the result leaves them.
    pub fn normal_form(&self, p: &ModElement, bounds: &Bounds) -> Result<ModElement> {
        if let Some(m) = p.keys().find(|m| !m.is_module()) {
            return Err(Error::Invalid(format!(
                "`{}` is not a module word",
                self.alg.order.render_word(m, &self.alg.gens)
            )));
        }
        self.check_bounds(p, bounds, "input")?;
        let nf = self.reduce(p.clone());
        self.check_bounds(&nf, bounds, "irreducible")?;
        Ok(nf)
    }

    /// Reduces `p`, adds the result as a monic rule and interreduces. Returns
    /// whether a rule was added.
    fn add_relation(&mut self, p: OpPoly, queue: &mut VecDeque<OpPoly>) -> bool {
        let mut nf = self.reduce(p);
        let Some((lead, lc)) = nf.pop_last() else {
            return false;
        };
        let inv = -(Rational::one() / lc);
        let rhs: OpPoly = nf.into_iter().map(|(m, c)| (m, c * &inv)).collect();
        let key = lead.ranks().to_vec();
        let stale: Vec<Vec<u32>> = self
            .rules
            .keys()
            .filter(|k| k.len() > key.len() && k.ends_with(&key))
            .cloned()
            .collect();
        for k in stale {
            let old = self.rules.remove(&k).expect("present");
            let mut rel = old;
            for c in rel.values_mut() {
                *c = -c.clone();
            }
            poly_add(&mut rel, Mono::from_ranks(&k), Rational::one());
            queue.push_back(rel);
        }
        self.rules.insert(key, rhs);
        self.forget();
        true
    }

    fn absorb(&mut self, queue: &mut VecDeque<OpPoly>) -> usize {
        let mut added = 0;
        while let Some(p) = queue.pop_front() {
            if self.add_relation(p, queue) {
                added += 1;
            }
        }
        added
    }

    fn tail_reduce(&mut self) {
        let keys: Vec<Vec<u32>> = self.rules.keys().cloned().collect();
        for k in keys {
            let rhs = self.rules[&k].clone();
            let nf = self.reduce(rhs);
            self.rules.insert(k, nf);
        }
        self.forget();
    }

    fn max_index(&self) -> u32 {
        self.locality.max().max(2)
    }

    /// Irreducible module words of X-degree ≤ `deg` and `∂`-power ≤ `dpow`,
    /// sorted by the order.
    pub fn enumerate_reduced(&self, deg: u32, dpow: u32) -> Vec<Mono> {
        let ord = &self.alg.order;
        let mut letters = vec![Letter::D];
        for n in 0..self.max_index() {
            for a in 0..self.alg.gens.len() {
                letters.push(Letter::L(n, a));
            }
        }
        let letter_ranks: Vec<(u32, bool)> = letters
            .iter()
            .map(|&l| (ord.rank(l), l == Letter::D))
            .collect();
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<u32>, u32, u32)> = Vec::new();
        if deg == 0 {
            return out;
        }
        for c in 0..self.alg.gens.len() {
            stack.push((vec![ord.rank(Letter::Gen(c))], 1, 0));
        }
        let mut buf = Vec::new();
        while let Some((w, dg, dp)) = stack.pop() {
            buf.clear();
            self.redexes_at(&w, 0, &mut buf, true);
            if !buf.is_empty() {
                continue;
            }
            for &(r, is_d) in &letter_ranks {
                let (ndg, ndp) = if is_d { (dg, dp + 1) } else { (dg + 1, dp) };
                if ndg <= deg && ndp <= dpow {
                    let mut nw = Vec::with_capacity(w.len() + 1);
                    nw.push(r);
                    nw.extend_from_slice(&w);
                    stack.push((nw, ndg, ndp));
                }
            }
            out.push(Mono::from_ranks(&w));
        }
        out.sort();
        out
    }

    pub fn count_reduced(&self, deg: u32, dpow: u32) -> usize {
        self.enumerate_reduced(deg, dpow).len()
    }

    /// `∂`-power a word can reach once its `R` letters turn into `∂^(s) L` sums.
    fn dpow_reach(&self, m: &Mono) -> u32 {
        word_stats(&self.alg.order, m).dpow + m.r_degree() * self.locality.max().saturating_sub(1)
    }

    fn within(&self, m: &Mono, b: &Bounds) -> bool {
        let s = word_stats(&self.alg.order, m);
        s.deg <= b.deg && self.dpow_reach(m) <= b.dpow && s.idx <= b.idx
    }

    /// Whether `x y` (followed by a module word) is the left side of a two-letter
    /// rule: an algebra pair rule or an extended-locality instance.
    fn two_letter_rule(&self, x: Letter, y: Letter) -> bool {
        if let (Letter::L(n, a), Letter::L(_, b)) = (x, y) {
            if n >= self.locality.get(a, b) {
                return true;
            }
        }
        self.alg.has_pair_rule(x, y)
    }

    fn is_locex(&self, x: Letter, y: Letter) -> bool {
        matches!((x, y), (Letter::L(n, a), Letter::L(_, b)) if n >= self.locality.get(a, b))
    }

    fn letters(&self, b: &Bounds) -> Vec<Letter> {
        let mut v = self.alg.letters(b);
        v.retain(|l| !matches!(l, Letter::Gen(_)));
        v
    }

    /// Critical words inside `bounds` for the current rule set.
    pub fn critical_words(&self, b: &Bounds) -> BTreeSet<Mono> {
        let ord = &self.alg.order;
        let letters = self.letters(b);
        let gens = self.alg.gens.len();
        let mut out = BTreeSet::new();
        let mut left_heads: Vec<Vec<u32>> = self.rules.keys().cloned().collect();
        for c in 0..gens {
            let gc = ord.rank(Letter::Gen(c));
            for &y in &letters {
                let schema = match y {
                    Letter::L(n, a) => n >= self.locality.get(a, c),
                    Letter::R(..) => true,
                    _ => false,
                };
                if schema {
                    left_heads.push(vec![ord.rank(y), gc]);
                }
            }
        }
        for w in &left_heads {
            if w.len() < 2 {
                continue;
            }
            let head = self.letter(w[0]);
            for &x in &letters {
                if self.two_letter_rule(x, head) {
                    let m = Mono::splice(&[ord.rank(x)], w, &[]);
                    if self.within(&m, b) {
                        out.insert(m);
                    }
                }
            }
        }
        let mut tails: BTreeMap<(u32, u32), Vec<Mono>> = BTreeMap::new();
        let mut tails_for = |deg: u32, dpow: u32| -> Vec<Mono> {
            tails
                .entry((deg, dpow))
                .or_insert_with(|| self.enumerate_reduced(deg, dpow))
                .clone()
        };
        for &x in &letters {
            for &y in &letters {
                let xy_ex = self.is_locex(x, y);
                let xy_rule = xy_ex || self.alg.has_pair_rule(x, y);
                if !xy_rule {
                    continue;
                }
                let head = [ord.rank(x), ord.rank(y)];
                if xy_ex && self.alg.has_pair_rule(x, y) {
                    let h = Mono::from_ranks(&head);
                    let (deg, dp) = (word_stats(ord, &h).deg, self.dpow_reach(&h));
                    if deg < b.deg && dp <= b.dpow {
                        for u in tails_for(b.deg - deg, b.dpow - dp) {
                            out.insert(Mono::splice(&head, u.ranks(), &[]));
                        }
                    }
                }
                for &z in &letters {
                    let yz_ex = self.is_locex(y, z);
                    if !(xy_ex || yz_ex) || !(yz_ex || self.alg.has_pair_rule(y, z)) {
                        continue;
                    }
                    let head3 = [ord.rank(x), ord.rank(y), ord.rank(z)];
                    let h = Mono::from_ranks(&head3);
                    let (s, dp) = (word_stats(ord, &h), self.dpow_reach(&h));
                    if s.deg >= b.deg || dp > b.dpow || s.idx > b.idx {
                        continue;
                    }
                    for u in tails_for(b.deg - s.deg, b.dpow - dp) {
                        out.insert(Mono::splice(&head3, u.ranks(), &[]));
                    }
                }
            }
        }
        out
    }

    /// Reduces every pair of overlapping rewrites of `w` against the first;
    /// returns the nonzero differences.
    fn resolve(&self, w: &Mono) -> Vec<OpPoly> {
        let r = w.ranks();
        let reds: Vec<Redex> = self
            .all_redexes(r)
            .into_iter()
            .filter(|x| x.pos(r.len()) <= 1)
            .collect();
        let mut out = Vec::new();
        if reds.len() < 2 {
            return out;
        }
        let base = self.apply(r, reds[0]);
        for red in &reds[1..] {
            let mut diff = base.clone();
            poly_add_all(&mut diff, &self.apply(r, *red), &-Rational::one());
            let nf = self.reduce(diff);
            if !nf.is_empty() {
                out.push(nf);
            }
        }
        out
    }

    /// Rules whose left side is not the leading word of `u · s` for a shorter
    /// explicit rule `s` and a word `u` of algebra letters.
    pub fn essential_rules(&self) -> Vec<(Mono, OpPoly)> {
        let all = self.rules();
        let alg_only = RewriteSystem::new(self.alg.clone(), LocalityFn::constant(u32::MAX));
        all.iter()
            .filter(|(lhs, _)| {
                !all.iter().any(|(other, _)| {
                    other.len() < lhs.len() && self.implied_by(lhs, other, &alg_only)
                })
            })
            .cloned()
            .collect()
    }

    fn implied_by(&self, lhs: &Mono, other: &Mono, alg_only: &RewriteSystem) -> bool {
        let (w, v) = (lhs.ranks(), other.ranks());
        if w.last() != v.last() {
            return false;
        }
        let mut rest: Vec<u32> = w[..w.len() - 1].to_vec();
        for x in &v[..v.len() - 1] {
            match rest.iter().position(|y| y == x) {
                Some(p) => {
                    rest.remove(p);
                }
                None => return false,
            }
        }
        let start = OpPoly::from([(Mono::splice(&rest, v, &[]), Rational::one())]);
        let nf = alg_only.reduce_pairs_only(start);
        nf.last_key_value().is_some_and(|(m, c)| m == lhs && !c.is_zero())
    }

    fn reduce_pairs_only(&self, mut work: OpPoly) -> OpPoly {
        let mut out = OpPoly::new();
        while let Some((m, c)) = work.pop_last() {
            let r = m.ranks();
            let pos = (0..r.len().saturating_sub(2))
                .find(|&i| self.alg.has_pair_rule(self.letter(r[i]), self.letter(r[i + 1])));
            match pos {
                None => poly_add(&mut out, m, c),
                Some(i) => poly_add_all(&mut work, &self.apply(r, Redex::Pair(i)), &c),
            }
        }
        out
    }

    pub fn render_rule(&self, lhs: &Mono, rhs: &OpPoly) -> String {
        let o = &self.alg.order;
        format!("{} -> {}", o.render_word(lhs, &self.alg.gens), o.render_poly(rhs, &self.alg.gens))
    }

    /// One `lhs -> rhs` line per explicit rule, sorted by the order.
    pub fn certificate_dump(&self) -> String {
        let mut s = String::new();
        for (l, r) in self.rules() {
            s.push_str(&self.render_rule(&l, &r));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, p: &OpPoly) -> String {
        self.alg.order.render_poly(p, &self.alg.gens)
    }
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub system: RewriteSystem,
    pub bounds: Bounds,
    pub status: Status,
    pub passes: usize,
    /// Critical words resolved in the final pass.
    pub certificate: Vec<Mono>,
}

impl CompletionResult {
    pub fn enumerate_reduced(&self, deg: u32, dpow: u32) -> Vec<Mono> {
        self.system.enumerate_reduced(deg, dpow)
    }

    pub fn count_reduced(&self, deg: u32, dpow: u32) -> usize {
        self.system.count_reduced(deg, dpow)
    }
}

pub const DEFAULT_MAX_PASSES: usize = 64;

/// Completion on the split null extension: rules are seeded from the module
/// relations, then every critical word inside `bounds` is resolved, nonzero
/// results become rules, and passes repeat until one finds nothing.
pub fn complete(rels: &ModuleRelations, bounds: &Bounds, max_passes: usize) -> Result<CompletionResult> {
    let mut sys = RewriteSystem::new(rels.alg.clone(), rels.locality.clone());
    let mut queue: VecDeque<OpPoly> = rels.initial()?.into();
    continue_completion(&mut sys, &mut queue, bounds, 2, max_passes)
}

/// Runs completion again starting from an existing rule set.
pub fn recomplete(prev: &RewriteSystem, bounds: &Bounds, max_passes: usize) -> Result<CompletionResult> {
    let mut sys = prev.clone();
    let mut queue = VecDeque::new();
    continue_completion(&mut sys, &mut queue, bounds, bounds.deg, max_passes)
}

fn continue_completion(
    sys: &mut RewriteSystem,
    queue: &mut VecDeque<OpPoly>,
    bounds: &Bounds,
    first_deg: u32,
    max_passes: usize,
) -> Result<CompletionResult> {
    sys.absorb(queue);
    let mut passes = 0;
    // words that resolved in an earlier pass are skipped until a pass finds
    // nothing; only the closing pass of the last stage rechecks everything
    let mut resolved: BTreeSet<Mono> = BTreeSet::new();
    // lower degrees first: their rules prune the tails of longer critical words
    for deg in first_deg.min(bounds.deg)..=bounds.deg {
        let stage = Bounds { deg, ..*bounds };
        let certify = deg == bounds.deg;
        let words = run_stage(sys, queue, &stage, max_passes, certify, &mut resolved, &mut passes);
        match words {
            Some(words) if certify => {
                sys.tail_reduce();
                return Ok(CompletionResult {
                    system: sys.clone(),
                    bounds: *bounds,
                    status: Status::CompleteAtBound,
                    passes,
                    certificate: words.into_iter().collect(),
                });
            }
            Some(_) => {}
            None => break,
        }
    }
    sys.tail_reduce();
    Ok(CompletionResult {
        system: sys.clone(),
        bounds: *bounds,
        status: Status::BoundExceeded,
        passes,
        certificate: Vec::new(),
    })
}

/// Passes at fixed bounds until one finds nothing; `None` when `max_passes`
/// runs out. With `certify`, the last pass rechecks every critical word.
fn run_stage(
    sys: &mut RewriteSystem,
    queue: &mut VecDeque<OpPoly>,
    bounds: &Bounds,
    max_passes: usize,
    certify: bool,
    resolved: &mut BTreeSet<Mono>,
    passes: &mut usize,
) -> Option<BTreeSet<Mono>> {
    let mut full = false;
    for _ in 0..max_passes {
        *passes += 1;
        let words = sys.critical_words(bounds);
        let mut found = false;
        let mut skipped = 0;
        let mut level = (0, 0);
        for w in &words {
            // absorb between levels so longer words see rules from shorter ones
            // while the memo stays valid within a level
            let here = (w.r_degree(), w.len());
            if here != level {
                level = here;
                if sys.absorb(queue) > 0 {
                    found = true;
                }
            }
            if !full && resolved.contains(w) {
                skipped += 1;
                continue;
            }
            let res = sys.resolve(w);
            if res.is_empty() {
                resolved.insert(w.clone());
            } else {
                queue.extend(res);
            }
        }
        if sys.absorb(queue) > 0 {
            found = true;
        }
        if found {
            full = false;
            continue;
        }
        if certify && skipped > 0 {
            full = true;
            continue;
        }
        return Some(words);
    }
    None
}
