//! The `K_1` envelope inside `Cend_2`: word images, the rank check and the
//! `PK_10` table read off matrices.

use rayon::prelude::*;

use super::graded::{combo_add, table_from_pairs, LabelCombination, PoissonTable};
use super::{Envelope, GradedLabel};
use crate::cend::{cend2_g, cend2_v, cend_bracket, cend_conjugate, cend_lambda_product, CendElement};
use crate::conformal::AxiomReport;
use crate::error::{Error, Result};
use crate::linalg::{rank, SparseVec};
use crate::ops::{Letter, Mono, OpPoly};
use crate::poly::{d, lam, rat, xv, Exponents, ExactPoly, Var};

/// Images of the generators `v`, `g`.
pub fn cend2_images(env: &Envelope) -> Result<Vec<CendElement>> {
    let gens = env.gens();
    if gens.len() != 2 {
        return Err(Error::Invalid("Cend_2 images are defined for K_1 only".into()));
    }
    let v = gens.lookup("v")?;
    let g = gens.lookup("g")?;
    let mut out = vec![CendElement::zero(2); 2];
    out[v] = cend2_v();
    out[g] = cend2_g();
    Ok(out)
}

fn image_of_word(images: &[CendElement], letters: &[Letter]) -> Result<CendElement> {
    let Some((last, ops)) = letters.split_last() else {
        return Err(Error::Invalid("empty word".into()));
    };
    let Letter::Gen(c) = *last else {
        return Err(Error::Invalid("word does not end in a generator".into()));
    };
    let mut m = images[c].clone();
    for l in ops.iter().rev() {
        m = match *l {
            Letter::D => m.apply_d(),
            Letter::L(n, a) => cend_lambda_product(&images[a], &m)?.coefficient_of(Var::L, n, true),
            // R_n^b w = {w_(n) b}
            Letter::R(n, b) => cend_conjugate(&m, &images[b])?.coefficient_of(Var::L, n, true),
            Letter::Gen(_) => return Err(Error::Invalid("generator inside a word".into())),
        };
    }
    Ok(m)
}

/// Image of any module word, reduced or not.
pub fn cend2_image(env: &Envelope, w: &Mono) -> Result<CendElement> {
    image_of_word(&cend2_images(env)?, &env.monomial_order().word(w))
}

/// Image of a reduced word of the `K_1` envelope.
pub fn cend2_embed(env: &Envelope, w: &Mono) -> Result<CendElement> {
    if env.system().is_reducible(w) {
        return Err(Error::Invalid(format!(
            "`{}` is not a reduced word",
            env.monomial_order().render_word(w, env.gens())
        )));
    }
    cend2_image(env, w)
}

pub fn cend2_embed_element(env: &Envelope, p: &OpPoly) -> Result<CendElement> {
    let images = cend2_images(env)?;
    let mut acc = CendElement::zero(2);
    for (w, c) in p {
        let m = image_of_word(&images, &env.monomial_order().word(w))?;
        acc = acc.add(&m.map(|e| e.scale(c)));
    }
    Ok(acc)
}

fn flatten(m: &CendElement) -> SparseVec<(usize, usize, Exponents)> {
    let mut v = SparseVec::new();
    for i in 0..m.size() {
        for j in 0..m.size() {
            for (e, c) in m.get(i, j).terms() {
                v.insert((i, j, *e), c.clone());
            }
        }
    }
    v
}

pub fn cend2_rank(images: &[CendElement]) -> usize {
    let vs: Vec<_> = images.iter().map(flatten).collect();
    rank(&vs)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndependenceReport {
    pub words: usize,
    pub rank: usize,
    /// Images with an entry of the first row not divisible by `x`.
    pub shape_failures: Vec<String>,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.rank == self.words && self.shape_failures.is_empty()
    }
}

/// Rank and shape of the images of all reduced words within the caps.
pub fn cend2_independence(env: &Envelope, degree: u32, dpow: u32) -> Result<IndependenceReport> {
    let words = env.completion.enumerate_reduced(degree, dpow);
    let images: Vec<CendElement> = words
        .par_iter()
        .map(|w| cend2_embed(env, w))
        .collect::<Result<_>>()?;
    let shape_failures = words
        .iter()
        .zip(&images)
        .filter(|(_, m)| !m.in_cend2q_shape())
        .map(|(w, m)| format!("{} ↦ {m}", env.monomial_order().render_word(w, env.gens())))
        .collect();
    Ok(IndependenceReport {
        words: words.len(),
        rank: cend2_rank(&images),
        shape_failures,
    })
}

/// `embed(u λ w) = embed(u) λ embed(w)` for reduced words with
/// `deg u + deg w ≤ max_degree` and `∂`-power at most `dpow`.
pub fn cend2_cross_check(env: &Envelope, max_degree: u32, dpow: u32) -> Result<AxiomReport> {
    let words = env.completion.enumerate_reduced(max_degree.saturating_sub(1), dpow);
    let mut pairs = Vec::new();
    for u in &words {
        for w in &words {
            if env.degree(u) + env.degree(w) <= max_degree {
                pairs.push((u, w));
            }
        }
    }
    let results: Vec<(String, Result<bool>)> = pairs
        .par_iter()
        .map(|(u, w)| {
            let name = format!(
                "({}) λ ({})",
                env.monomial_order().render_word(u, env.gens()),
                env.monomial_order().render_word(w, env.gens())
            );
            let check = || -> Result<bool> {
                let one = |m: &Mono| OpPoly::from([(m.clone(), rat(1, 1))]);
                let prod = env.lambda_product(&one(u), &one(w))?;
                let mut lhs = CendElement::zero(2);
                for (k, q) in &prod {
                    let lk = lam().pow(*k);
                    lhs = lhs.add(&cend2_embed_element(env, q)?.scale_poly(&lk));
                }
                let rhs = cend_lambda_product(&cend2_embed(env, u)?, &cend2_embed(env, w)?)?;
                Ok(lhs == rhs)
            };
            (name, check())
        })
        .collect();
    let mut rep = AxiomReport::default();
    for (name, r) in results {
        match r {
            Ok(true) => rep.checked += 1,
            Ok(false) => rep.failures.push(format!("{name}: images differ")),
            Err(Error::BoundExceeded(_)) => rep.skipped += 1,
            Err(e) => rep.failures.push(format!("{name}: {e}")),
        }
    }
    Ok(rep)
}

/// Matrices of the graded basis: `a_n = diag(xⁿ, xⁿ − ½∂xⁿ⁻¹)`,
/// `b_n = diag(0, xⁿ⁻²)`, `e_n = [[0, xⁿ], [−xⁿ⁻¹, 0]]`, `f_n = [[0, 0], [xⁿ⁻², 0]]`,
/// `â_n = a_n − ⅛∂² b_n` (`n ≥ 2`).
pub fn pk_matrix(l: GradedLabel) -> Result<CendElement> {
    if !l.is_valid() {
        return Err(Error::Invalid(format!("no matrix for {l}")));
    }
    let x = |k: u32| ExactPoly::var_pow(Var::X, k);
    let zero = ExactPoly::zero;
    let m = match l {
        GradedLabel::A(n) => {
            let lower = &x(n) - &(&d() * &x(n - 1)).scale(&rat(1, 2));
            CendElement::from_rows(vec![vec![x(n), zero()], vec![zero(), lower]])?
        }
        GradedLabel::B(n) => CendElement::from_rows(vec![vec![zero(), zero()], vec![zero(), x(n - 2)]])?,
        GradedLabel::E(n) => CendElement::from_rows(vec![vec![zero(), x(n)], vec![-x(n - 1), zero()]])?,
        GradedLabel::F(n) => CendElement::from_rows(vec![vec![zero(), zero()], vec![x(n - 2), zero()]])?,
        GradedLabel::AHat(1) => pk_matrix(GradedLabel::A(1))?,
        GradedLabel::AHat(n) => {
            let b = pk_matrix(GradedLabel::B(n))?.scale_poly(&d().pow(2).scale(&rat(1, 8)));
            pk_matrix(GradedLabel::A(n))?.sub(&b)
        }
        _ => return Err(Error::Invalid(format!("{l} has no Cend_2 matrix"))),
    };
    Ok(m)
}

fn x_coefficients(p: &ExactPoly) -> Vec<(u32, ExactPoly)> {
    (0..=p.degree_in(Var::X))
        .map(|k| (k, p.coefficient_of(Var::X, k, false)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

fn divide_by_x(p: &ExactPoly) -> Result<ExactPoly> {
    let mut out = ExactPoly::zero();
    for (e, c) in p.terms() {
        if e[Var::X as usize] == 0 {
            return Err(Error::Invalid(format!("{p} is not divisible by x")));
        }
        let mut e2 = *e;
        e2[Var::X as usize] -= 1;
        out.add_term(e2, c.clone());
    }
    Ok(out)
}

fn at_shifted(l: GradedLabel, k: u32, shift: u32) -> Option<GradedLabel> {
    let n = k + shift;
    let label = match l {
        GradedLabel::A(_) => GradedLabel::A(n),
        GradedLabel::B(_) => GradedLabel::B(n),
        GradedLabel::E(_) => GradedLabel::E(n),
        _ => GradedLabel::F(n),
    };
    label.is_valid().then_some(label)
}

/// Coordinates of a matrix of the shape `[[x f₁₁, x f₁₂], [f₂₁, f₂₂]]` in the
/// basis `a_n, b_n, e_n, f_n`, coefficients in `∂` and `λ`.
pub fn cend2_decompose(m: &CendElement) -> Result<LabelCombination> {
    if m.size() != 2 {
        return Err(Error::Invalid("expected a 2x2 matrix".into()));
    }
    let mut out = LabelCombination::new();
    let put = |c: &mut LabelCombination, proto: GradedLabel, p: &ExactPoly, shift: u32| -> Result<()> {
        for (k, coef) in x_coefficients(p) {
            match at_shifted(proto, k, shift) {
                Some(l) => combo_add(c, l, &coef),
                None => return Err(Error::Invalid(format!("x^{k} term outside the basis: {m}"))),
            }
        }
        Ok(())
    };
    // even part: x f = Σ p_n xⁿ, and g − (x − ½∂) f = Σ q_n xⁿ⁻²
    let f = divide_by_x(m.get(0, 0))?;
    put(&mut out, GradedLabel::A(0), m.get(0, 0), 0)?;
    let corr = &xv() - &d().scale(&rat(1, 2));
    put(&mut out, GradedLabel::B(0), &(m.get(1, 1) - &(&corr * &f)), 2)?;
    // odd part: x h = Σ r_n xⁿ, and k + h = Σ s_n xⁿ⁻²
    let h = divide_by_x(m.get(0, 1))?;
    put(&mut out, GradedLabel::E(0), m.get(0, 1), 0)?;
    put(&mut out, GradedLabel::F(0), &(m.get(1, 0) + &h), 2)?;
    Ok(out)
}

/// Rewrites `ā_n` as `â_n + ⅛∂² b̄_n`.
pub fn to_hatted(c: &LabelCombination) -> LabelCombination {
    let mut out = LabelCombination::new();
    let eighth_d2 = d().pow(2).scale(&rat(1, 8));
    for (l, p) in c {
        match *l {
            GradedLabel::A(1) => combo_add(&mut out, GradedLabel::AHat(1), p),
            GradedLabel::A(n) => {
                combo_add(&mut out, GradedLabel::AHat(n), p);
                combo_add(&mut out, GradedLabel::B(n), &(p * &eighth_d2));
            }
            other => combo_add(&mut out, other, p),
        }
    }
    out
}

fn degree_part(c: &LabelCombination, deg: u32) -> LabelCombination {
    c.iter().filter(|(l, _)| l.degree() == deg).map(|(l, p)| (*l, p.clone())).collect()
}

/// Graded product and bracket of two basis matrices.
pub fn cend2_graded_entries(
    a: GradedLabel,
    b: GradedLabel,
    hatted: bool,
) -> Result<(LabelCombination, LabelCombination)> {
    let (ma, mb) = (pk_matrix(a)?, pk_matrix(b)?);
    let (n, m) = (a.degree(), b.degree());
    let read = |x: &CendElement| -> Result<LabelCombination> {
        let c = cend2_decompose(x)?;
        if let Some((l, _)) = c.iter().find(|(l, _)| l.degree() > n + m) {
            return Err(Error::Invalid(format!("{a} λ {b} reaches {l}")));
        }
        Ok(if hatted { to_hatted(&c) } else { c })
    };
    let prod = read(&cend_lambda_product(&ma, &mb)?)?;
    let br = read(&cend_bracket(&ma, &mb)?)?;
    let lead = degree_part(&br, n + m);
    if !lead.is_empty() {
        return Err(Error::Invalid(format!(
            "[{a} λ {b}] keeps degree {}: {}",
            n + m,
            super::render_combo(&lead)
        )));
    }
    Ok((degree_part(&prod, n + m), degree_part(&br, n + m - 1)))
}

/// Even part `ā_n` (`n ≥ 1`), `b̄_n` (`2 ≤ n`) up to `cap`; entries with the
/// odd labels are appended without an oracle.
pub fn pk10_table(cap: u32) -> Result<PoissonTable> {
    let even: Vec<GradedLabel> = (1..=cap)
        .map(GradedLabel::A)
        .chain((2..=cap).map(GradedLabel::B))
        .collect();
    let odd: Vec<GradedLabel> = (1..=cap)
        .map(GradedLabel::E)
        .chain((2..=cap).map(GradedLabel::F))
        .collect();
    let all: Vec<GradedLabel> = even.iter().chain(&odd).copied().collect();
    let mut pairs = Vec::new();
    for x in &all {
        for y in &all {
            pairs.push((*x, *y));
        }
    }
    table_from_pairs("PK10", cap, even, pairs, |a, b| {
        let (comm, br) = cend2_graded_entries(a, b, false)?;
        Ok((comm, br, !a.is_odd() && !b.is_odd()))
    })
}

/// `â_n`, `b̄_n` up to `cap`.
pub fn pk10_hatted_table(cap: u32) -> Result<PoissonTable> {
    let labels: Vec<GradedLabel> = (1..=cap)
        .map(GradedLabel::AHat)
        .chain((2..=cap).map(GradedLabel::B))
        .collect();
    let mut pairs = Vec::new();
    for x in &labels {
        for y in &labels {
            pairs.push((*x, *y));
        }
    }
    table_from_pairs("PK10-hatted", cap, labels, pairs, |a, b| {
        let (comm, br) = cend2_graded_entries(a, b, true)?;
        Ok((comm, br, true))
    })
}

/// `[[a]]`, `(ab)` and friends.
pub fn pk10_formulas(kind: super::EntryKind, a: GradedLabel, b: GradedLabel) -> Vec<super::Formula> {
    use super::EntryKind::{Bracket, Comm};
    use GradedLabel::{A, B};
    let quarter = rat(1, 4);
    // (λ² + ∂λ)
    let ll = &lam().pow(2) + &(&d() * &lam());
    let mut c = LabelCombination::new();
    let name = match (kind, a, b) {
        (Bracket, A(n), A(m)) => {
            let (ni, mi) = (n as i64, m as i64);
            combo_add(&mut c, A(n + m - 1), &lin(ni, ni + mi));
            if n + m >= 3 {
                let p = &ll * &lin(ni - 1, mi + ni - 2);
                combo_add(&mut c, B(n + m - 1), &p.scale(&quarter));
            }
            "[a_n a_m]"
        }
        (Bracket, A(n), B(m)) => {
            combo_add(&mut c, B(n + m - 1), &lin(n as i64, n as i64 + m as i64 - 2));
            "[a_n b_m]"
        }
        (Bracket, B(_), B(_)) => "[b b]",
        (Comm, A(n), A(m)) => {
            combo_add(&mut c, A(n + m), &ExactPoly::one());
            combo_add(&mut c, B(n + m), &ll.scale(&quarter));
            "(a_n a_m)"
        }
        (Comm, A(n), B(m)) => {
            combo_add(&mut c, B(n + m), &ExactPoly::one());
            "(a_n b_m)"
        }
        (Comm, B(_), B(_)) => "(b b)",
        _ => return Vec::new(),
    };
    vec![(name, c)]
}

/// `a∂ + bλ` with integer coefficients.
fn lin(a: i64, b: i64) -> ExactPoly {
    &d().scale(&rat(a, 1)) + &lam().scale(&rat(b, 1))
}

pub fn pk10_hatted_formulas(kind: super::EntryKind, a: GradedLabel, b: GradedLabel) -> Vec<super::Formula> {
    use super::EntryKind::{Bracket, Comm};
    use GradedLabel::{AHat, B};
    let eighth = rat(1, 8);
    let mut c = LabelCombination::new();
    let name = match (kind, a, b) {
        (Comm, AHat(1), AHat(m)) if m > 1 => {
            combo_add(&mut c, AHat(m + 1), &ExactPoly::one());
            combo_add(&mut c, B(m + 1), &lam().pow(2).scale(&eighth));
            "(ah_1 ah_m)"
        }
        (Comm, AHat(n), AHat(m)) if n > 1 && m > 1 => {
            combo_add(&mut c, AHat(n + m), &ExactPoly::one());
            "(ah_n ah_m)"
        }
        (Bracket, AHat(1), AHat(m)) if m > 1 => {
            combo_add(&mut c, AHat(m), &lin(1, m as i64 + 1));
            // (m−1)λ³ − ∂λ² − ∂²λ − ∂³
            let l = lam();
            let dd = d();
            let p = &(&(&l.pow(3).scale(&rat(m as i64 - 1, 1)) - &(&dd * &l.pow(2))) - &(&dd.pow(2) * &l))
                - &dd.pow(3);
            combo_add(&mut c, B(m), &p.scale(&eighth));
            "[ah_1 ah_m]"
        }
        (Bracket, AHat(n), AHat(m)) if n > 1 && m > 1 => {
            combo_add(&mut c, AHat(n + m - 1), &lin(n as i64, (n + m) as i64));
            // −(n/8)(4λ∂² + λ²∂)
            let p = &(&lam() * &d().pow(2)).scale(&rat(4, 1)) + &(&lam().pow(2) * &d());
            combo_add(&mut c, B(n + m - 1), &p.scale(&rat(-(n as i64), 8)));
            "[ah_n ah_m]"
        }
        _ => return Vec::new(),
    };
    vec![(name, c)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{render_combo, EntryKind};

    #[test]
    fn basis_matrices_decompose_to_themselves() {
        for l in [
            GradedLabel::A(1),
            GradedLabel::A(4),
            GradedLabel::B(2),
            GradedLabel::B(5),
            GradedLabel::E(1),
            GradedLabel::E(3),
            GradedLabel::F(2),
        ] {
            let c = cend2_decompose(&pk_matrix(l).unwrap()).unwrap();
            assert_eq!(c, LabelCombination::from([(l, ExactPoly::one())]), "{l}");
        }
        assert!(pk_matrix(GradedLabel::B(1)).is_err());
        // v and g
        assert_eq!(pk_matrix(GradedLabel::A(1)).unwrap(), cend2_v());
        let g = cend2_decompose(&cend2_g()).unwrap();
        assert_eq!(render_combo(&g), "(1/2) e_1");
    }

    #[test]
    fn shape_is_enforced() {
        assert!(cend2_decompose(&CendElement::identity(2)).is_err());
    }

    #[test]
    fn hatted_change_of_basis() {
        let c = LabelCombination::from([(GradedLabel::A(3), lam())]);
        assert_eq!(render_combo(&to_hatted(&c)), "(l) ah_3 + (1/8*d^2*l) b_3");
    }

    #[test]
    fn a2_b2_bracket() {
        let (_, br) = cend2_graded_entries(GradedLabel::A(2), GradedLabel::B(2), false).unwrap();
        assert_eq!(render_combo(&br), "(2*d + 2*l) b_3");
        let f = pk10_formulas(EntryKind::Bracket, GradedLabel::A(2), GradedLabel::B(2));
        assert_eq!(f[0].1, br);
    }
}
