use super::{ConformalAlgebraDesc, HElement, Kind, Which};
use crate::error::{Error, Result};
use crate::poly::{d, lam, mu, ExactPoly};

/// Outcome of an exhaustive identity check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checked: usize,
    /// Instances touching an undefined entry of a truncated table.
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }

    pub(crate) fn record(&mut self, what: impl FnOnce() -> String, residue: Result<HElement>, alg: &ConformalAlgebraDesc) {
        match residue {
            Ok(r) if r.is_zero() => self.checked += 1,
            Ok(r) => self
                .failures
                .push(format!("{}: residue {}", what(), r.render(&alg.gens))),
            Err(Error::MissingEntry(..)) => self.skipped += 1,
            Err(e) => self.failures.push(format!("{}: {e}", what())),
        }
    }
}

/// `∂^s a` for every generator and `s ≤ max_dpow`.
pub fn test_elements(alg: &ConformalAlgebraDesc, max_dpow: u32) -> Vec<HElement> {
    let mut out = Vec::new();
    for a in 0..alg.gens.len() {
        for s in 0..=max_dpow {
            out.push(HElement::dpow(a, s));
        }
    }
    out
}

fn neg_d_minus(nu: &ExactPoly) -> ExactPoly {
    -&d() - nu
}

struct Ctx<'a> {
    alg: &'a ConformalAlgebraDesc,
}

impl Ctx<'_> {
    fn at(&self, w: Which, x: &HElement, y: &HElement, nu: &ExactPoly) -> Result<HElement> {
        self.alg.product_at(w, x, y, nu)
    }

    fn name(&self, x: &HElement) -> String {
        x.render(&self.alg.gens)
    }

    fn antisymmetry(&self, w: Which, x: &HElement, y: &HElement, sym: bool) -> Result<HElement> {
        let direct = self.at(w, x, y, &lam())?;
        let swapped = self.at(w, y, x, &neg_d_minus(&lam()))?;
        let s = self.alg.sign(x, y);
        let s = if sym { -s } else { s };
        Ok(direct.add(&swapped.scale(&s)))
    }

    fn jacobi(&self, x: &HElement, y: &HElement, z: &HElement) -> Result<HElement> {
        let b = Which::Bracket;
        let t1 = self.at(b, x, &self.at(b, y, z, &mu())?, &lam())?;
        let t2 = self.at(b, y, &self.at(b, x, z, &lam())?, &mu())?;
        let t3 = self.at(b, &self.at(b, x, y, &lam())?, z, &(&lam() + &mu()))?;
        Ok(t1.sub(&t2.scale(&self.alg.sign(x, y))).sub(&t3))
    }

    fn associativity(&self, x: &HElement, y: &HElement, z: &HElement) -> Result<HElement> {
        let p = Which::Product;
        let t1 = self.at(p, x, &self.at(p, y, z, &mu())?, &lam())?;
        let t2 = self.at(p, &self.at(p, x, y, &lam())?, z, &(&lam() + &mu()))?;
        Ok(t1.sub(&t2))
    }

    fn leibniz(&self, x: &HElement, y: &HElement, z: &HElement) -> Result<HElement> {
        let (b, p) = (Which::Bracket, Which::Product);
        let t1 = self.at(b, x, &self.at(p, y, z, &mu())?, &lam())?;
        let t2 = self.at(p, &self.at(b, x, y, &lam())?, z, &(&lam() + &mu()))?;
        let t3 = self.at(p, y, &self.at(b, x, z, &lam())?, &mu())?;
        Ok(t1.sub(&t2).sub(&t3.scale(&self.alg.sign(x, y))))
    }

    /// Even form: `[(x λ y) μ z] = (y_{μ−λ} [x λ z]) + (x λ [y_{μ−λ} z])`.
    fn leibniz2(&self, x: &HElement, y: &HElement, z: &HElement) -> Result<HElement> {
        let (b, p) = (Which::Bracket, Which::Product);
        let shift = &mu() - &lam();
        let t1 = self.at(b, &self.at(p, x, y, &lam())?, z, &mu())?;
        let t2 = self.at(p, y, &self.at(b, x, z, &lam())?, &shift)?;
        let t3 = self.at(p, x, &self.at(b, y, z, &shift)?, &lam())?;
        Ok(t1.sub(&t2).sub(&t3))
    }
}

fn for_pairs(els: &[HElement], mut f: impl FnMut(&HElement, &HElement)) {
    for x in els {
        for y in els {
            f(x, y);
        }
    }
}

fn for_triples(els: &[HElement], mut f: impl FnMut(&HElement, &HElement, &HElement)) {
    for x in els {
        for y in els {
            for z in els {
                f(x, y, z);
            }
        }
    }
}

/// Verifies every axiom applicable to `alg.kind` on all triples `∂^s a`.
pub fn check_axioms(alg: &ConformalAlgebraDesc, max_dpow: u32) -> AxiomReport {
    check_axioms_on(alg, &test_elements(alg, max_dpow))
}

/// Same checks over the given elements only.
pub fn check_axioms_on(alg: &ConformalAlgebraDesc, els: &[HElement]) -> AxiomReport {
    let cx = Ctx { alg };
    let mut rep = AxiomReport::default();
    if alg.kind.has_bracket() {
        for_pairs(els, |x, y| {
            let r = cx.antisymmetry(Which::Bracket, x, y, false);
            rep.record(|| format!("antisymmetry({}, {})", cx.name(x), cx.name(y)), r, alg);
        });
        for_triples(els, |x, y, z| {
            let r = cx.jacobi(x, y, z);
            rep.record(
                || format!("jacobi({}, {}, {})", cx.name(x), cx.name(y), cx.name(z)),
                r,
                alg,
            );
        });
    }
    if alg.kind.has_product() {
        for_triples(els, |x, y, z| {
            let r = cx.associativity(x, y, z);
            rep.record(
                || format!("associativity({}, {}, {})", cx.name(x), cx.name(y), cx.name(z)),
                r,
                alg,
            );
        });
    }
    if matches!(alg.kind, Kind::Commutative | Kind::Poisson) {
        for_pairs(els, |x, y| {
            let r = cx.antisymmetry(Which::Product, x, y, true);
            rep.record(|| format!("commutativity({}, {})", cx.name(x), cx.name(y)), r, alg);
        });
    }
    if alg.kind == Kind::Poisson {
        for_triples(els, |x, y, z| {
            let r = cx.leibniz(x, y, z);
            rep.record(
                || format!("leibniz({}, {}, {})", cx.name(x), cx.name(y), cx.name(z)),
                r,
                alg,
            );
            let all_even = [x, y, z]
                .iter()
                .all(|e| e.parity(&alg.gens) == Some(false));
            if all_even {
                let r = cx.leibniz2(x, y, z);
                rep.record(
                    || format!("leibniz2({}, {}, {})", cx.name(x), cx.name(y), cx.name(z)),
                    r,
                    alg,
                );
            }
        }
        );
    }
    rep
}

/// In an associative algebra with its commutator bracket:
/// `[(x λ y) μ z] = (x λ [y_{μ−λ} z]) + (−1)^{|y||z|} {[x λ z]_{μ−λ} y}`.
pub fn check_leibniz2_as(alg: &ConformalAlgebraDesc, max_dpow: u32) -> AxiomReport {
    let els = test_elements(alg, max_dpow);
    let mut rep = AxiomReport::default();
    let shift = &mu() - &lam();
    for_triples(&els, |x, y, z| {
        let r = (|| -> Result<HElement> {
            let xy = alg.product_at(Which::Product, x, y, &lam())?;
            let t1 = alg.commutator_at(&xy, z, &mu())?;
            let t2 = alg.product_at(Which::Product, x, &alg.commutator_at(y, z, &shift)?, &lam())?;
            let xz = alg.commutator_at(x, z, &lam())?;
            let t3 = alg.product_at(Which::Product, &xz, y, &neg_d_minus(&shift))?;
            Ok(t1.sub(&t2).sub(&t3.scale(&alg.sign(y, z))))
        })();
        rep.record(|| "leibniz2-assoc".to_string(), r, alg);
    });
    rep
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::poly::int;

    #[test]
    fn virasoro_and_k1_pass() {
        let r = check_axioms(&make_virasoro(), 2);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.checked > 0);
        let r = check_axioms(&make_neveu_schwarz(), 1);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn perturbed_virasoro_fails() {
        let mut vir = make_virasoro();
        vir.set_entry(Which::Bracket, 0, 0, HElement::term(0, &d() + &lam().scale(&int(3))));
        let r = check_axioms(&vir, 0);
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.starts_with("jacobi")), "{:?}", r.failures);
    }

    #[test]
    fn current_algebras_pass() {
        let sl2 = make_current(&FinAlgebra::sl2(), Kind::Lie);
        assert!(check_axioms(&sl2, 1).passed());
        let p = make_current(&FinAlgebra::truncated_poly("v", 3, false), Kind::Poisson);
        let r = check_axioms(&p, 1);
        assert!(r.passed() && r.skipped == 0, "{r:?}");
    }

    #[test]
    fn matrix_current_commutator_passes_leibniz2_as() {
        let mat = make_current(&FinAlgebra::matrix_units(2), Kind::Associative);
        assert!(check_axioms(&mat, 0).passed());
        assert!(check_leibniz2_as(&mat, 1).passed());
        let lie = commutator_functor(&mat).unwrap();
        assert!(check_axioms(&lie, 1).passed());
    }
}
