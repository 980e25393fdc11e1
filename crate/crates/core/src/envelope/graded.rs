//! Associated graded Poisson tables: labels, H-basis expression, the `PV_2`
//! and `PV_3` tables and the closed-form entries they are compared with.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;

use super::{graded_products, virasoro_envelope, Envelope, LambdaPoly};
use crate::conformal::{
    check_axioms_on, render_combination, AxiomReport, ConformalAlgebraDesc, GeneratorSet, HElement, Kind,
    Which,
};
use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::ops::{Bounds, Letter, Mono, OpPoly};
use crate::poly::{d, int, lam, rat, sign, ExactPoly, Rational, Var};

/// Basis labels of graded components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GradedLabel {
    /// `ā_n`
    A(u32),
    /// `â_n = ā_n − ⅛ ∂² b̄_n`
    AHat(u32),
    B(u32),
    E(u32),
    F(u32),
    /// `v^n`, image of `(L_0)^{n−1} v`
    V(u32),
    /// `x_n = (L_0)^{n−1} v`
    X(u32),
    /// `y_{n,m} = (L_0)^{n−1} (L_1)^{m−1} L_2 v`
    Y(u32, u32),
}

impl GradedLabel {
    pub fn degree(self) -> u32 {
        match self {
            GradedLabel::Y(n, m) => n + m,
            GradedLabel::A(n)
            | GradedLabel::AHat(n)
            | GradedLabel::B(n)
            | GradedLabel::E(n)
            | GradedLabel::F(n)
            | GradedLabel::V(n)
            | GradedLabel::X(n) => n,
        }
    }

    pub fn is_odd(self) -> bool {
        matches!(self, GradedLabel::E(_) | GradedLabel::F(_))
    }

    pub fn max_index(self) -> u32 {
        match self {
            GradedLabel::Y(n, m) => n.max(m),
            l => l.degree(),
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            GradedLabel::B(n) | GradedLabel::F(n) => n >= 2,
            GradedLabel::Y(n, m) => n >= 1 && m >= 1,
            l => l.degree() >= 1,
        }
    }
}

impl fmt::Display for GradedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradedLabel::A(n) => write!(f, "a_{n}"),
            GradedLabel::AHat(n) => write!(f, "ah_{n}"),
            GradedLabel::B(n) => write!(f, "b_{n}"),
            GradedLabel::E(n) => write!(f, "e_{n}"),
            GradedLabel::F(n) => write!(f, "f_{n}"),
            GradedLabel::V(n) => write!(f, "v^{n}"),
            GradedLabel::X(n) => write!(f, "x_{n}"),
            GradedLabel::Y(n, m) => write!(f, "y_{n},{m}"),
        }
    }
}

impl FromStr for GradedLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown label `{s}`"));
        let num = |t: &str| t.parse::<u32>().map_err(|_| bad());
        let label = if let Some(k) = s.strip_prefix("v^") {
            GradedLabel::V(num(k)?)
        } else if let Some(k) = s.strip_prefix("y_") {
            let (n, m) = k.split_once(',').ok_or_else(bad)?;
            GradedLabel::Y(num(n)?, num(m)?)
        } else {
            let (tag, k) = s.split_once('_').ok_or_else(bad)?;
            let k = num(k)?;
            match tag {
                "a" => GradedLabel::A(k),
                "ah" => GradedLabel::AHat(k),
                "b" => GradedLabel::B(k),
                "e" => GradedLabel::E(k),
                "f" => GradedLabel::F(k),
                "x" => GradedLabel::X(k),
                _ => return Err(bad()),
            }
        };
        if !label.is_valid() {
            return Err(bad());
        }
        Ok(label)
    }
}

/// `Σ p_ℓ(∂, λ) ℓ`
pub type LabelCombination = BTreeMap<GradedLabel, ExactPoly>;

pub fn combo_add(c: &mut LabelCombination, l: GradedLabel, p: &ExactPoly) {
    let e = c.entry(l).or_insert_with(ExactPoly::zero);
    *e += p;
    if e.is_zero() {
        c.remove(&l);
    }
}

pub fn render_combo(c: &LabelCombination) -> String {
    render_combination(c.iter().map(|(l, p)| (l.to_string(), p)))
}

/// `c(∂, λ) ↦ c(∂, −∂−λ)`, the right side of `(b λ a)` from `(a λ b)`.
fn swap_sides(c: &LabelCombination, factor: &Rational) -> LabelCombination {
    let repl = -&d() - lam();
    c.iter()
        .map(|(l, p)| (*l, p.substitute(Var::L, &repl).scale(factor)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntryKind {
    Bracket,
    Comm,
}

impl EntryKind {
    pub fn keyword(self) -> &'static str {
        match self {
            EntryKind::Bracket => "BRACKET",
            EntryKind::Comm => "COMM",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub value: LabelCombination,
    /// False for entries with no closed form to compare against.
    pub oracle: bool,
}

/// Graded products `(ā λ b̄)` and brackets `[ā λ b̄]` over a label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonTable {
    pub name: String,
    pub cap: u32,
    /// Labels whose pairwise entries were computed (and are verified).
    pub labels: Vec<GradedLabel>,
    pub entries: BTreeMap<(EntryKind, GradedLabel, GradedLabel), TableEntry>,
}

impl PoissonTable {
    pub fn new(name: &str, cap: u32, labels: Vec<GradedLabel>) -> Self {
        Self {
            name: name.to_string(),
            cap,
            labels,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, kind: EntryKind, a: GradedLabel, b: GradedLabel) -> Option<&LabelCombination> {
        self.entries.get(&(kind, a, b)).map(|e| &e.value)
    }

    pub fn insert(&mut self, kind: EntryKind, a: GradedLabel, b: GradedLabel, value: LabelCombination, oracle: bool) {
        self.entries.insert((kind, a, b), TableEntry { value, oracle });
    }

    /// `BRACKET x_2 x_3 = (2*d + 5*l) x_4 + ...`, one line per entry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((kind, a, b), e) in &self.entries {
            out.push_str(&format!("{} {a} {b} = {}", kind.keyword(), render_combo(&e.value)));
            if !e.oracle {
                out.push_str("  [no-oracle]");
            }
            out.push('\n');
        }
        out
    }

    /// Every label mentioned anywhere in the table.
    pub fn all_labels(&self) -> BTreeSet<GradedLabel> {
        let mut s: BTreeSet<GradedLabel> = self.labels.iter().copied().collect();
        for ((_, a, b), e) in &self.entries {
            s.insert(*a);
            s.insert(*b);
            s.extend(e.value.keys().copied());
        }
        s
    }

    /// The table as a truncated Poisson conformal algebra on its labels;
    /// pairs without an entry are undefined.
    pub fn to_algebra(&self) -> Result<(ConformalAlgebraDesc, Vec<GradedLabel>)> {
        let labels: Vec<GradedLabel> = self.all_labels().into_iter().collect();
        let mut gens = GeneratorSet::new();
        for l in &labels {
            gens.push(&l.to_string(), l.is_odd())?;
        }
        let index: HashMap<GradedLabel, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let mut alg = ConformalAlgebraDesc::new(&self.name, gens, Kind::Poisson);
        alg.partial = true;
        for ((kind, a, b), e) in &self.entries {
            let mut h = HElement::zero();
            for (l, p) in &e.value {
                h.add_term(index[l], p);
            }
            let which = match kind {
                EntryKind::Bracket => Which::Bracket,
                EntryKind::Comm => Which::Product,
            };
            alg.set_entry(which, index[a], index[b], h);
        }
        Ok((alg, labels))
    }
}

/// Poisson conformal axioms on all triples of table labels with index at
/// most `cap`; instances needing an entry outside the table are skipped.
pub fn verify_graded_poisson(table: &PoissonTable, cap: u32) -> Result<AxiomReport> {
    let (alg, labels) = table.to_algebra()?;
    let chosen: BTreeSet<GradedLabel> = table.labels.iter().copied().filter(|l| l.max_index() <= cap).collect();
    let els: Vec<HElement> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| chosen.contains(l))
        .map(|(i, _)| HElement::gen(i))
        .collect();
    Ok(check_axioms_on(&alg, &els))
}

/// Label systems of abstractly computed graded envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelFamily {
    /// `v^n` in `gr U(Vir; {v}, 2)`
    Pv2,
    /// `x_n`, `y_{n,m}` in `gr U(Vir; {v}, 3)`
    Pv3,
}

impl LabelFamily {
    pub fn labels_of_degree(self, d: u32) -> Vec<GradedLabel> {
        match self {
            LabelFamily::Pv2 if d >= 1 => vec![GradedLabel::V(d)],
            LabelFamily::Pv3 if d >= 1 => {
                let mut v = vec![GradedLabel::X(d)];
                v.extend((1..d).map(|n| GradedLabel::Y(n, d - n)));
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn representative(self, env: &Envelope, l: GradedLabel) -> Result<OpPoly> {
        let v = env.gens().lookup("v")?;
        let mut w = Vec::new();
        match (self, l) {
            (LabelFamily::Pv2, GradedLabel::V(n)) | (LabelFamily::Pv3, GradedLabel::X(n)) if n >= 1 => {
                w.extend(std::iter::repeat_n(Letter::L(0, v), n as usize - 1));
            }
            (LabelFamily::Pv3, GradedLabel::Y(n, m)) if n >= 1 && m >= 1 => {
                w.extend(std::iter::repeat_n(Letter::L(0, v), n as usize - 1));
                w.extend(std::iter::repeat_n(Letter::L(1, v), m as usize - 1));
                w.push(Letter::L(2, v));
            }
            _ => return Err(Error::Invalid(format!("label {l} is not in this family"))),
        }
        w.push(Letter::Gen(v));
        Ok(env.reduce(env.word(&w)))
    }
}

#[derive(Default)]
struct DegreeBasis {
    /// `∂^s ℓ` inserted for `s < depth`.
    depth: u32,
    gens: Vec<(GradedLabel, u32)>,
    current: Vec<OpPoly>,
    ech: Echelon<Mono>,
}

/// Expresses top-degree parts of envelope elements over `H = 𝕜[∂]` in the
/// images of the labels.
pub struct GradedBasis<'a> {
    env: &'a Envelope,
    family: LabelFamily,
    cache: Mutex<HashMap<u32, DegreeBasis>>,
}

impl<'a> GradedBasis<'a> {
    pub fn new(env: &'a Envelope, family: LabelFamily) -> Self {
        Self {
            env,
            family,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn top(&self, p: &OpPoly, d: u32) -> OpPoly {
        p.iter()
            .filter(|(m, _)| self.env.degree(m) == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }

    fn deepen(&self, b: &mut DegreeBasis, d: u32, depth: u32) -> Result<()> {
        let labels = self.family.labels_of_degree(d);
        if b.current.is_empty() {
            for l in &labels {
                b.current.push(self.family.representative(self.env, *l)?);
            }
        }
        while b.depth < depth {
            for (i, l) in labels.iter().enumerate() {
                if b.depth > 0 {
                    b.current[i] = self.env.apply_d(&b.current[i]);
                }
                let v = self.top(&b.current[i], d);
                if !b.ech.insert(&v) {
                    return Err(Error::Invalid(format!(
                        "d^{} {l} depends on the other degree-{d} labels",
                        b.depth
                    )));
                }
                b.gens.push((*l, b.depth));
            }
            b.depth += 1;
        }
        Ok(())
    }

    /// `Σ p_ℓ(∂) ℓ` with the same degree-`d` part as `p` (lower parts ignored).
    pub fn express(&self, d: u32, p: &OpPoly) -> Result<LabelCombination> {
        let target = self.top(p, d);
        if target.is_empty() {
            return Ok(LabelCombination::new());
        }
        let dmax = target
            .keys()
            .map(|m| self.env.monomial_order().word(m).iter().filter(|l| **l == Letter::D).count() as u32)
            .max()
            .unwrap_or(0);
        let mut cache = self.cache.lock().expect("basis lock");
        let b = cache.entry(d).or_default();
        let mut depth = dmax + 2;
        loop {
            self.deepen(b, d, depth)?;
            let (res, combo) = b.ech.reduce(&target);
            if res.is_empty() {
                let mut out = LabelCombination::new();
                for (i, c) in combo {
                    let (l, s) = b.gens[i];
                    combo_add(&mut out, l, &ExactPoly::var_pow(Var::D, s).scale(&c));
                }
                return Ok(out);
            }
            if depth > dmax + d + 1 {
                return Err(Error::Invalid(format!(
                    "`{}` is not in the H-span of the degree-{d} labels",
                    self.env.render(&res)
                )));
            }
            depth += 1;
        }
    }

    pub fn express_lambda(&self, d: u32, p: &LambdaPoly) -> Result<LabelCombination> {
        let mut out = LabelCombination::new();
        for (k, q) in p {
            let lk = ExactPoly::var_pow(Var::L, *k);
            for (l, c) in self.express(d, q)? {
                combo_add(&mut out, l, &(&c * &lk));
            }
        }
        Ok(out)
    }
}

/// Graded entries of a label pair computed in the envelope.
pub fn abstract_entries(
    basis: &GradedBasis<'_>,
    a: GradedLabel,
    b: GradedLabel,
) -> Result<(LabelCombination, LabelCombination)> {
    let env = basis.env;
    let u = basis.family.representative(env, a)?;
    let v = basis.family.representative(env, b)?;
    let (n, m) = (a.degree(), b.degree());
    let gp = graded_products(env, &u, n, &v, m)?;
    let comm = basis.express_lambda(n + m, &gp.comm)?;
    let bracket = basis.express_lambda(n + m - 1, &gp.bracket)?;
    Ok((comm, bracket))
}

pub(super) fn table_from_pairs(
    name: &str,
    cap: u32,
    labels: Vec<GradedLabel>,
    pairs: Vec<(GradedLabel, GradedLabel)>,
    entry: impl Fn(GradedLabel, GradedLabel) -> Result<(LabelCombination, LabelCombination, bool)> + Sync,
) -> Result<PoissonTable> {
    let rows: Vec<_> = pairs
        .par_iter()
        .map(|&(a, b)| entry(a, b).map(|r| (a, b, r)))
        .collect::<Result<_>>()?;
    let mut t = PoissonTable::new(name, cap, labels);
    for (a, b, (comm, bracket, oracle)) in rows {
        t.insert(EntryKind::Comm, a, b, comm, oracle);
        t.insert(EntryKind::Bracket, a, b, bracket, oracle);
    }
    Ok(t)
}

fn square_pairs(labels: &[GradedLabel], max_degree: u32) -> Vec<(GradedLabel, GradedLabel)> {
    let mut v = Vec::new();
    for a in labels {
        for b in labels {
            if a.degree() + b.degree() <= max_degree {
                v.push((*a, *b));
            }
        }
    }
    v
}

pub fn pv2_bounds(cap: u32) -> Bounds {
    Bounds {
        deg: 2 * cap,
        dpow: 2,
        idx: 2,
        len: 4,
    }
}

pub fn pv3_bounds(cap: u32) -> Bounds {
    Bounds {
        deg: 2 * cap,
        dpow: 2,
        idx: 3,
        len: 4,
    }
}

/// `gr U(Vir; {v}, 2)` on `v^1 … v^cap`.
pub fn pv2_table_in(env: &Envelope, cap: u32) -> Result<PoissonTable> {
    let basis = GradedBasis::new(env, LabelFamily::Pv2);
    let labels: Vec<GradedLabel> = (1..=cap).map(GradedLabel::V).collect();
    let pairs = square_pairs(&labels, 2 * cap);
    table_from_pairs("PV2", cap, labels, pairs, |a, b| {
        let (c, br) = abstract_entries(&basis, a, b)?;
        Ok((c, br, true))
    })
}

pub fn pv2_table(cap: u32) -> Result<PoissonTable> {
    pv2_table_in(&virasoro_envelope(2, &pv2_bounds(cap))?, cap)
}

/// `gr U(Vir; {v}, 3)` on `x_n`, `y_{n,m}` with indices at most `cap`, for
/// every pair of total degree at most `2·cap`.
pub fn pv3_table_in(env: &Envelope, cap: u32) -> Result<PoissonTable> {
    let basis = GradedBasis::new(env, LabelFamily::Pv3);
    let mut labels: Vec<GradedLabel> = (1..=cap).map(GradedLabel::X).collect();
    for n in 1..=cap {
        for m in 1..=cap {
            labels.push(GradedLabel::Y(n, m));
        }
    }
    let pairs = square_pairs(&labels, 2 * cap);
    table_from_pairs("PV3", cap, labels, pairs, |a, b| {
        let (c, br) = abstract_entries(&basis, a, b)?;
        Ok((c, br, true))
    })
}

pub fn pv3_table(cap: u32) -> Result<PoissonTable> {
    pv3_table_in(&virasoro_envelope(3, &pv3_bounds(cap))?, cap)
}

/// A named closed form for one table entry.
pub type Formula = (&'static str, LabelCombination);

fn term(c: &mut LabelCombination, l: GradedLabel, p: ExactPoly) {
    if l.is_valid() {
        combo_add(c, l, &p);
    } else {
        debug_assert!(p.is_zero(), "nonzero coefficient on {l:?}");
    }
}

/// `a∂ + bλ`
fn dl(a: Rational, b: Rational) -> ExactPoly {
    &d().scale(&a) + &lam().scale(&b)
}

fn q(n: u32) -> Rational {
    int(n as i64)
}

fn qi(n: i64) -> Rational {
    int(n)
}

pub fn pv2_formulas(kind: EntryKind, a: GradedLabel, b: GradedLabel) -> Vec<Formula> {
    use GradedLabel::V;
    let (V(n), V(m)) = (a, b) else { return Vec::new() };
    let mut c = LabelCombination::new();
    match kind {
        EntryKind::Bracket => term(&mut c, V(n + m - 1), dl(q(n), q(n + m))),
        EntryKind::Comm => term(&mut c, V(n + m), ExactPoly::one()),
    }
    vec![(if kind == EntryKind::Bracket { "[v^n v^m]" } else { "(v^n v^m)" }, c)]
}

pub fn pv3_formulas(kind: EntryKind, a: GradedLabel, b: GradedLabel) -> Vec<Formula> {
    use GradedLabel::{X, Y};
    let half = rat(1, 2);
    let mut out = Vec::new();
    match (kind, a, b) {
        (EntryKind::Comm, X(n), X(m)) => {
            let mut c = LabelCombination::new();
            term(&mut c, X(n + m), ExactPoly::one());
            // ½(λ∂ + λ²)
            term(&mut c, Y(n + m - 1, 1), (&(&lam() * &d()) + &lam().pow(2)).scale(&half));
            out.push(("(x_n x_m)", c));
        }
        (EntryKind::Comm, X(n), Y(m, k)) => {
            let mut c = LabelCombination::new();
            term(&mut c, Y(n + m, k), ExactPoly::one());
            term(&mut c, Y(n + m - 1, k + 1), lam());
            out.push(("(x_n y_m,k)", c));
        }
        (EntryKind::Comm, Y(..), Y(..)) => out.push(("(y y)", LabelCombination::new())),
        (EntryKind::Bracket, X(n), X(m)) => {
            let mut c = LabelCombination::new();
            term(&mut c, X(n + m - 1), dl(q(n), q(n + m)));
            // ½λ(∂+λ)((n−1)∂ + (n+m−2)λ)
            let tail = dl(qi(n as i64 - 1), qi(n as i64 + m as i64 - 2));
            let p = &(&lam() * &(&d() + &lam())) * &tail;
            if n + m >= 3 {
                term(&mut c, Y(n + m - 2, 1), p.scale(&half));
            }
            out.push(("[x_n x_m]", c));
        }
        (EntryKind::Bracket, X(n), Y(m, k)) => {
            if n == 1 && k == 1 && m >= 2 {
                let mut c = LabelCombination::new();
                term(&mut c, Y(m, 1), dl(qi(1), q(m)));
                term(&mut c, Y(m - 1, 2), lam().pow(2).scale(&q(m - 1)));
                out.push(("[x_1 y_m,1]", c));
            }
            let (ni, mi, ki) = (n as i64, m as i64, k as i64);
            let mut c = LabelCombination::new();
            if k >= 2 {
                term(&mut c, Y(n + m, k - 1), ExactPoly::constant(qi(ni * (1 - ki))));
            }
            // n(∂+λ) − (n−1)(k−1)λ
            term(&mut c, Y(n + m - 1, k), dl(qi(ni), qi(ni - (ni - 1) * (ki - 1))));
            if n + m >= 3 {
                // λ((n+m−2)λ + (n−1)∂)
                let p = &lam() * &dl(qi(ni - 1), qi(ni + mi - 2));
                term(&mut c, Y(n + m - 2, k + 1), p);
            }
            out.push(("[x_n y_m,k]", c));
        }
        (EntryKind::Bracket, Y(..), Y(..)) => out.push(("[y y]", LabelCombination::new())),
        _ => {}
    }
    out
}

/// `formulas`, completed to reversed pairs through (anti)symmetry.
pub fn with_reversed(
    formulas: impl Fn(EntryKind, GradedLabel, GradedLabel) -> Vec<Formula>,
) -> impl Fn(EntryKind, GradedLabel, GradedLabel) -> Vec<Formula> {
    move |kind, a, b| {
        let direct = formulas(kind, a, b);
        if !direct.is_empty() {
            return direct;
        }
        let s = sign(a.is_odd() && b.is_odd());
        let factor = match kind {
            EntryKind::Bracket => -s,
            EntryKind::Comm => s,
        };
        formulas(kind, b, a)
            .into_iter()
            .map(|(name, c)| (name, swap_sides(&c, &factor)))
            .collect()
    }
}

/// Comparison of a table with closed forms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableCheck {
    pub checked: usize,
    /// Entries inside the domain with no closed form.
    pub uncovered: usize,
    pub mismatches: Vec<String>,
}

impl TableCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares every oracle entry accepted by `domain` with every formula
/// that applies to it.
pub fn check_table(
    table: &PoissonTable,
    formulas: impl Fn(EntryKind, GradedLabel, GradedLabel) -> Vec<Formula>,
    domain: impl Fn(EntryKind, GradedLabel, GradedLabel) -> bool,
) -> TableCheck {
    let mut rep = TableCheck::default();
    for ((kind, a, b), e) in &table.entries {
        if !e.oracle || !domain(*kind, *a, *b) {
            continue;
        }
        let fs = formulas(*kind, *a, *b);
        if fs.is_empty() {
            rep.uncovered += 1;
        }
        for (name, expected) in fs {
            if expected == e.value {
                rep.checked += 1;
            } else {
                rep.mismatches.push(format!(
                    "{name} at {} {a} {b}: table {} vs formula {}",
                    kind.keyword(),
                    render_combo(&e.value),
                    render_combo(&expected)
                ));
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_render_and_parse() {
        for l in [
            GradedLabel::A(3),
            GradedLabel::AHat(1),
            GradedLabel::B(2),
            GradedLabel::E(1),
            GradedLabel::F(4),
            GradedLabel::V(6),
            GradedLabel::X(2),
            GradedLabel::Y(3, 1),
        ] {
            assert_eq!(l.to_string().parse::<GradedLabel>().unwrap(), l);
        }
        assert!("b_1".parse::<GradedLabel>().is_err());
        assert!("y_0,1".parse::<GradedLabel>().is_err());
        assert!("z_1".parse::<GradedLabel>().is_err());
    }

    #[test]
    fn pv2_small_table() {
        let t = pv2_table(3).unwrap();
        let br = t.get(EntryKind::Bracket, GradedLabel::V(2), GradedLabel::V(3)).unwrap();
        assert_eq!(render_combo(br), "(2*d + 5*l) v^4");
        let rep = check_table(&t, pv2_formulas, |_, _, _| true);
        assert!(rep.passed(), "{:?}", rep.mismatches);
        assert_eq!(rep.checked, 18);
    }

    #[test]
    fn pv3_generator_square() {
        let t = pv3_table(2).unwrap();
        let c = t.get(EntryKind::Comm, GradedLabel::X(1), GradedLabel::X(1)).unwrap();
        assert_eq!(render_combo(c), "x_2 + (1/2*d*l + 1/2*l^2) y_1,1");
        let b = t.get(EntryKind::Bracket, GradedLabel::X(1), GradedLabel::Y(1, 1)).unwrap();
        assert_eq!(render_combo(b), "(d + l) y_1,1");
    }

    #[test]
    fn reversed_formula_is_skew() {
        let f = with_reversed(pv3_formulas);
        let got = f(EntryKind::Comm, GradedLabel::Y(1, 1), GradedLabel::X(1));
        assert_eq!(render_combo(&got[0].1), "(-d - l) y_1,2 + y_2,1");
        let got = f(EntryKind::Bracket, GradedLabel::Y(1, 1), GradedLabel::X(1));
        // −(∂ + (−∂−λ)) = λ
        assert_eq!(render_combo(&got[0].1), "(l) y_1,1");
    }

    #[test]
    fn dump_is_sorted_by_kind_then_labels() {
        let t = pv2_table(2).unwrap();
        let dump = t.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "BRACKET v^1 v^1 = (d + 2*l) v^1");
        assert_eq!(lines[4], "COMM v^1 v^1 = v^2");
    }
}
