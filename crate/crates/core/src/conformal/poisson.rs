use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{AxiomReport, ConformalAlgebraDesc, FinAlgebra, HElement, Kind, Which};
use crate::error::{Error, Result};
use crate::poly::{int, lam, mu, ExactPoly, Rational};

/// Element of `V[t, t^{-1}]`: basis index of `V` and power of `t`.
pub type LaurentElem = BTreeMap<(usize, i64), Rational>;

fn laurent_add(acc: &mut LaurentElem, k: (usize, i64), c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(k).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&k);
    }
}

fn laurent_bilinear(
    x: &LaurentElem,
    y: &LaurentElem,
    f: impl Fn(usize, i64, usize, i64) -> Option<LaurentElem>,
) -> Option<LaurentElem> {
    let mut out = LaurentElem::new();
    for ((a, n), c1) in x {
        for ((b, m), c2) in y {
            for (k, c) in f(*a, *n, *b, *m)? {
                laurent_add(&mut out, k, c * c1 * c2);
            }
        }
    }
    Some(out)
}

fn from_vector(v: &[(usize, Rational)], t: i64, scale: &Rational) -> LaurentElem {
    let mut out = LaurentElem::new();
    for (i, c) in v {
        laurent_add(&mut out, (*i, t), c * scale);
    }
    out
}

/// `[a t^n, b t^m] = [a,b] t^{n+m} + (n a D(b) − m b D(a)) t^{n+m−1}`.
/// `None` when a needed product leaves a truncated `V`.
pub fn laurent_poisson_bracket(
    fin: &FinAlgebra,
    a: usize,
    n: i64,
    b: usize,
    m: i64,
) -> Option<LaurentElem> {
    let ea = vec![(a, Rational::one())];
    let eb = vec![(b, Rational::one())];
    let ab = fin.br(&ea, &eb)?;
    let adb = fin.mul(&ea, &fin.apply_der(&eb))?;
    let bda = fin.mul(&eb, &fin.apply_der(&ea))?;
    let mut out = from_vector(&ab, n + m, &Rational::one());
    for (k, c) in from_vector(&adb, n + m - 1, &int(n)) {
        laurent_add(&mut out, k, c);
    }
    for (k, c) in from_vector(&bda, n + m - 1, &int(-m)) {
        laurent_add(&mut out, k, c);
    }
    Some(out)
}

pub fn laurent_bracket(fin: &FinAlgebra, x: &LaurentElem, y: &LaurentElem) -> Option<LaurentElem> {
    laurent_bilinear(x, y, |a, n, b, m| laurent_poisson_bracket(fin, a, n, b, m))
}

pub fn laurent_product(fin: &FinAlgebra, x: &LaurentElem, y: &LaurentElem) -> Option<LaurentElem> {
    laurent_bilinear(x, y, |a, n, b, m| {
        let v = fin.mul_basis(a, b)?;
        Some(from_vector(&v, n + m, &Rational::one()))
    })
}

fn diff(x: LaurentElem, y: &LaurentElem) -> LaurentElem {
    let mut out = x;
    for (k, c) in y {
        laurent_add(&mut out, *k, -c.clone());
    }
    out
}

/// Antisymmetry, Jacobi and Leibniz on all monomials `a t^n`, `|n| ≤ max_t`.
pub fn check_laurent_poisson(fin: &FinAlgebra, max_t: i64) -> AxiomReport {
    let mut mons = Vec::new();
    for a in 0..fin.dim() {
        for n in -max_t..=max_t {
            mons.push(LaurentElem::from([((a, n), Rational::one())]));
        }
    }
    let mut rep = AxiomReport::default();
    let mut tally = |name: &str, r: Option<LaurentElem>| match r {
        None => rep.skipped += 1,
        Some(r) if r.is_empty() => rep.checked += 1,
        Some(r) => rep.failures.push(format!("{name}: residue {r:?}")),
    };
    for x in &mons {
        for y in &mons {
            let r = (|| {
                let xy = laurent_bracket(fin, x, y)?;
                let yx = laurent_bracket(fin, y, x)?;
                let mut s = xy;
                for (k, c) in yx {
                    laurent_add(&mut s, k, c);
                }
                Some(s)
            })();
            tally("antisymmetry", r);
            for z in &mons {
                let jac = (|| {
                    let t1 = laurent_bracket(fin, x, &laurent_bracket(fin, y, z)?)?;
                    let t2 = laurent_bracket(fin, y, &laurent_bracket(fin, x, z)?)?;
                    let t3 = laurent_bracket(fin, &laurent_bracket(fin, x, y)?, z)?;
                    Some(diff(diff(t1, &t2), &t3))
                })();
                tally("jacobi", jac);
                let leib = (|| {
                    let t1 = laurent_bracket(fin, x, &laurent_product(fin, y, z)?)?;
                    let t2 = laurent_product(fin, &laurent_bracket(fin, x, y)?, z)?;
                    let t3 = laurent_product(fin, y, &laurent_bracket(fin, x, z)?)?;
                    Some(diff(diff(t1, &t2), &t3))
                })();
                tally("leibniz", leib);
            }
        }
    }
    rep
}

/// Verifies that `lgens` span a Lie conformal subalgebra: every bracket of two
/// of them lies in their H-span.
pub fn check_lie_subalgebra(p: &ConformalAlgebraDesc, lgens: &[usize]) -> Result<()> {
    for &a in lgens {
        for &b in lgens {
            let e = match p.entry(Which::Bracket, a, b) {
                Ok(e) => e,
                Err(Error::MissingEntry(..)) => continue,
                Err(e) => return Err(e),
            };
            let outside = e.terms().map(|(c, _)| c).find(|c| !lgens.contains(c));
            if let Some(c) = outside {
                return Err(Error::Invalid(format!(
                    "[{} λ {}] leaves the subalgebra through `{}`",
                    p.gens.name(a),
                    p.gens.name(b),
                    p.gens.name(c)
                )));
            }
        }
    }
    Ok(())
}

fn module_at(p: &ConformalAlgebraDesc, a: &HElement, u: &HElement, nu: &ExactPoly) -> Result<HElement> {
    let br = p.product_at(Which::Bracket, a, u, nu)?;
    let pr = p.product_at(Which::Product, a, u, nu)?;
    Ok(br.add(&pr.mul_poly(nu)))
}

/// `⟨a λ u⟩ = [a λ u] + λ (a λ u)` for `a` in the H-span of `lgens`.
pub fn lie_module_action(
    p: &ConformalAlgebraDesc,
    lgens: &[usize],
    a: &HElement,
    u: &HElement,
) -> Result<HElement> {
    if p.kind != Kind::Poisson {
        return Err(Error::WrongKind {
            op: "lie_module_action",
            kind: p.kind.keyword().to_string(),
        });
    }
    check_lie_subalgebra(p, lgens)?;
    if let Some((c, _)) = a.terms().find(|(c, _)| !lgens.contains(c)) {
        return Err(Error::Invalid(format!("`{}` is not in the subalgebra", p.gens.name(c))));
    }
    module_at(p, a, u, &lam())
}

/// `⟨a λ ⟨b μ u⟩⟩ − (−1)^{|a||b|} ⟨b μ ⟨a λ u⟩⟩ = ⟨[a λ b]_{λ+μ} u⟩` for
/// `a, b` among `∂^s lgens` and `u` among all `∂^s` generators.
pub fn check_module_jacobi(p: &ConformalAlgebraDesc, lgens: &[usize], max_dpow: u32) -> Result<AxiomReport> {
    check_lie_subalgebra(p, lgens)?;
    let mut lels = Vec::new();
    for &a in lgens {
        for s in 0..=max_dpow {
            lels.push(HElement::dpow(a, s));
        }
    }
    let uels = super::test_elements(p, max_dpow);
    let mut rep = AxiomReport::default();
    for a in &lels {
        for b in &lels {
            for u in &uels {
                let r = (|| -> Result<HElement> {
                    let t1 = module_at(p, a, &module_at(p, b, u, &mu())?, &lam())?;
                    let t2 = module_at(p, b, &module_at(p, a, u, &lam())?, &mu())?;
                    let ab = p.product_at(Which::Bracket, a, b, &lam())?;
                    let t3 = module_at(p, &ab, u, &(&lam() + &mu()))?;
                    Ok(t1.sub(&t2.scale(&p.sign(a, b))).sub(&t3))
                })();
                rep.record(
                    || format!("module-jacobi({}, {}, {})", a.render(&p.gens), b.render(&p.gens), u.render(&p.gens)),
                    r,
                    p,
                );
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn laurent_examples() {
        let fin = FinAlgebra::truncated_poly("u", 3, true);
        // [t^n, t^m] = 0 since D(1) = 0
        assert!(laurent_poisson_bracket(&fin, 0, 2, 0, -1).unwrap().is_empty());
        // a = b = u, n = 1, m = 0: u t^0
        let r = laurent_poisson_bracket(&fin, 1, 1, 1, 0).unwrap();
        assert_eq!(r, LaurentElem::from([((1, 0), Rational::one())]));
    }

    #[test]
    fn laurent_bracket_is_poisson() {
        let fin = FinAlgebra::truncated_poly("u", 4, true);
        let rep = check_laurent_poisson(&fin, 2);
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.checked > rep.skipped);
    }

    #[test]
    fn zero_structure_gives_zero_action() {
        let mut fin = FinAlgebra::abelian(2);
        fin.mul = BTreeMap::from([((0, 0), vec![]), ((0, 1), vec![]), ((1, 0), vec![]), ((1, 1), vec![])]);
        let p = make_current(&fin, Kind::Poisson);
        let act = lie_module_action(&p, &[0, 1], &HElement::gen(0), &HElement::gen(1)).unwrap();
        assert!(act.is_zero());
    }

    #[test]
    fn pv2_module_over_virasoro_part() {
        let pv2 = make_pv2(5);
        let rep = check_module_jacobi(&pv2, &[0], 1).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(check_lie_subalgebra(&pv2, &[1]).is_err());
    }
}
