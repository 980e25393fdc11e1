use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{ConformalAlgebraDesc, GeneratorSet, HElement, Kind, Which};
use crate::error::{Error, Result};
use crate::poly::{d, int, lam, rat, ExactPoly, Rational};

/// Sparse vector over the basis of a [`FinAlgebra`].
pub type Vector = Vec<(usize, Rational)>;

/// A finite-dimensional (possibly truncated) ordinary algebra given by
/// structure constants: product, Lie/Poisson bracket and a linear map `D`.
///
/// With `partial` set, an absent product or bracket entry means "outside the
/// truncation" rather than zero; consumers skip such instances.
#[derive(Debug, Clone, Default)]
pub struct FinAlgebra {
    pub names: Vec<String>,
    pub mul: BTreeMap<(usize, usize), Vector>,
    pub bracket: BTreeMap<(usize, usize), Vector>,
    pub der: Vec<Vector>,
    pub partial: bool,
}

fn add_into(acc: &mut BTreeMap<usize, Rational>, v: &[(usize, Rational)], c: &Rational) {
    for (i, x) in v {
        let slot = acc.entry(*i).or_insert_with(Rational::zero);
        *slot += x * c;
    }
}

pub fn normalize(acc: BTreeMap<usize, Rational>) -> Vector {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl FinAlgebra {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn lookup(&self, t: &BTreeMap<(usize, usize), Vector>, i: usize, j: usize) -> Option<Vector> {
        match t.get(&(i, j)) {
            Some(v) => Some(v.clone()),
            None if self.partial => None,
            None => Some(Vec::new()),
        }
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Option<Vector> {
        self.lookup(&self.mul, i, j)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Option<Vector> {
        self.lookup(&self.bracket, i, j)
    }

    fn bilinear(
        &self,
        f: impl Fn(usize, usize) -> Option<Vector>,
        x: &[(usize, Rational)],
        y: &[(usize, Rational)],
    ) -> Option<Vector> {
        let mut acc = BTreeMap::new();
        for (i, a) in x {
            for (j, b) in y {
                add_into(&mut acc, &f(*i, *j)?, &(a * b));
            }
        }
        Some(normalize(acc))
    }

    pub fn mul(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Option<Vector> {
        self.bilinear(|i, j| self.mul_basis(i, j), x, y)
    }

    pub fn br(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Option<Vector> {
        self.bilinear(|i, j| self.bracket_basis(i, j), x, y)
    }

    pub fn apply_der(&self, x: &[(usize, Rational)]) -> Vector {
        let mut acc = BTreeMap::new();
        for (i, a) in x {
            if let Some(di) = self.der.get(*i) {
                add_into(&mut acc, di, a);
            }
        }
        normalize(acc)
    }

    /// `𝕜[v]/(v^k)` on the basis `v0 .. v{k-1}` with `D = d/dv` and zero bracket.
    ///
    /// `partial = false` gives the honest quotient (`v^i v^j = 0` past the cut);
    /// `partial = true` treats those products as unknown, which is what makes
    /// `d/dv` usable as a derivation on the truncated model.
    pub fn truncated_poly(var: &str, k: usize, partial: bool) -> Self {
        let names = (0..k).map(|i| format!("{var}{i}")).collect();
        let mut mul = BTreeMap::new();
        let mut bracket = BTreeMap::new();
        for i in 0..k {
            for j in 0..k {
                if i + j < k {
                    mul.insert((i, j), vec![(i + j, Rational::one())]);
                } else if !partial {
                    mul.insert((i, j), Vec::new());
                }
                bracket.insert((i, j), Vec::new());
            }
        }
        let der = (0..k)
            .map(|i| if i == 0 { Vec::new() } else { vec![(i - 1, int(i as i64))] })
            .collect();
        Self {
            names,
            mul,
            bracket,
            der,
            partial,
        }
    }

    /// `M_n(𝕜)` on matrix units `e11, e12, ..` (row-major) with the commutator bracket.
    pub fn matrix_units(n: usize) -> Self {
        let idx = |i: usize, j: usize| i * n + j;
        let mut names = Vec::new();
        for i in 0..n {
            for j in 0..n {
                names.push(format!("e{}{}", i + 1, j + 1));
            }
        }
        let mut mul = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = if j == k { vec![(idx(i, l), Rational::one())] } else { Vec::new() };
                        mul.insert((idx(i, j), idx(k, l)), v);
                    }
                }
            }
        }
        let mut alg = Self {
            names,
            mul,
            bracket: BTreeMap::new(),
            der: vec![Vec::new(); n * n],
            partial: false,
        };
        alg.bracket = alg.commutator_table();
        alg
    }

    fn commutator_table(&self) -> BTreeMap<(usize, usize), Vector> {
        let mut t = BTreeMap::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let mut acc = BTreeMap::new();
                add_into(&mut acc, &self.mul_basis(i, j).unwrap_or_default(), &Rational::one());
                add_into(&mut acc, &self.mul_basis(j, i).unwrap_or_default(), &-Rational::one());
                t.insert((i, j), normalize(acc));
            }
        }
        t
    }

    /// `sl_2` on `e, f, h` with `[e,f] = h`, `[h,e] = 2e`, `[h,f] = -2f`.
    pub fn sl2() -> Self {
        let mut bracket = BTreeMap::new();
        let mut set = |i: usize, j: usize, v: Vector| {
            let neg = v.iter().map(|(k, c)| (*k, -c.clone())).collect();
            bracket.insert((i, j), v);
            bracket.insert((j, i), neg);
        };
        let (e, f, h) = (0, 1, 2);
        set(e, f, vec![(h, int(1))]);
        set(h, e, vec![(e, int(2))]);
        set(h, f, vec![(f, int(-2))]);
        for i in 0..3 {
            bracket.insert((i, i), Vec::new());
        }
        Self {
            names: vec!["e".into(), "f".into(), "h".into()],
            mul: BTreeMap::new(),
            bracket,
            der: vec![Vec::new(); 3],
            partial: false,
        }
    }

    /// Zero bracket on `n` basis elements.
    pub fn abelian(n: usize) -> Self {
        let mut bracket = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                bracket.insert((i, j), Vec::new());
            }
        }
        Self {
            names: (0..n).map(|i| format!("a{i}")).collect(),
            mul: BTreeMap::new(),
            bracket,
            der: vec![Vec::new(); n],
            partial: false,
        }
    }

    fn gens(&self) -> GeneratorSet {
        GeneratorSet::from_names(&self.names)
    }
}

fn vector_elem(v: &[(usize, Rational)], coeff: &ExactPoly) -> HElement {
    let mut e = HElement::zero();
    for (i, c) in v {
        e.add_term(*i, &coeff.scale(c));
    }
    e
}

/// `Cur A`: λ-constant products copied from `A`.
pub fn make_current(fin: &FinAlgebra, kind: Kind) -> ConformalAlgebraDesc {
    let mut alg = ConformalAlgebraDesc::new("Cur", fin.gens(), kind);
    alg.partial = fin.partial;
    let one = ExactPoly::one();
    for i in 0..fin.dim() {
        for j in 0..fin.dim() {
            if kind.has_bracket() {
                if let Some(v) = fin.bracket_basis(i, j) {
                    alg.set_entry(Which::Bracket, i, j, vector_elem(&v, &one));
                }
            }
            if kind.has_product() {
                if let Some(v) = fin.mul_basis(i, j) {
                    alg.set_entry(Which::Product, i, j, vector_elem(&v, &one));
                }
            }
        }
    }
    alg.locality_from_table();
    alg
}

pub fn make_virasoro() -> ConformalAlgebraDesc {
    let mut alg = ConformalAlgebraDesc::new("Vir", GeneratorSet::from_names(&["v"]), Kind::Lie);
    alg.set_entry(Which::Bracket, 0, 0, HElement::term(0, &d() + &lam().scale(&int(2))));
    alg.locality_from_table();
    alg
}

/// `K_1` on `v` (even) and `g` (odd).
pub fn make_neveu_schwarz() -> ConformalAlgebraDesc {
    let mut gens = GeneratorSet::new();
    let v = gens.push("v", false).unwrap();
    let g = gens.push("g", true).unwrap();
    let mut alg = ConformalAlgebraDesc::new("K1", gens, Kind::Lie);
    let half = rat(1, 2);
    alg.set_entry(Which::Bracket, v, v, HElement::term(v, &d() + &lam().scale(&int(2))));
    alg.set_entry(
        Which::Bracket,
        g,
        v,
        HElement::term(g, &d().scale(&half) + &lam().scale(&rat(3, 2))),
    );
    alg.set_entry(Which::Bracket, v, g, HElement::term(g, &d() + &lam().scale(&rat(3, 2))));
    alg.set_entry(Which::Bracket, g, g, HElement::term(v, ExactPoly::constant(-half)));
    alg.locality_from_table();
    alg
}

/// Checks `D(xy) = D(x)y + xD(y)` and the same for the bracket on every
/// defined basis pair.
pub fn check_derivation(fin: &FinAlgebra) -> Result<()> {
    let basis = |i: usize| vec![(i, Rational::one())];
    for i in 0..fin.dim() {
        for j in 0..fin.dim() {
            let (x, y) = (basis(i), basis(j));
            let (dx, dy) = (fin.apply_der(&x), fin.apply_der(&y));
            for (name, op) in [("product", 0), ("bracket", 1)] {
                let f = |a: &[(usize, Rational)], b: &[(usize, Rational)]| {
                    if op == 0 {
                        fin.mul(a, b)
                    } else {
                        fin.br(a, b)
                    }
                };
                let (Some(xy), Some(t1), Some(t2)) = (f(&x, &y), f(&dx, &y), f(&x, &dy)) else {
                    continue;
                };
                let lhs = fin.apply_der(&xy);
                let mut acc = BTreeMap::new();
                add_into(&mut acc, &t1, &Rational::one());
                add_into(&mut acc, &t2, &Rational::one());
                add_into(&mut acc, &lhs, &-Rational::one());
                if !normalize(acc).is_empty() {
                    return Err(Error::Invalid(format!(
                        "D is not a derivation of the {name} on ({}, {})",
                        fin.names[i], fin.names[j]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `(x λ y) = xy`, `[x λ y] = [x,y] + ∂(y D(x)) + λ D(xy)` on `H ⊗ V`.
pub fn make_quadratic(fin: &FinAlgebra) -> Result<ConformalAlgebraDesc> {
    check_derivation(fin)?;
    let mut alg = ConformalAlgebraDesc::new("Quad", fin.gens(), Kind::Poisson);
    alg.partial = fin.partial;
    let one = ExactPoly::one();
    let basis = |i: usize| vec![(i, Rational::one())];
    for i in 0..fin.dim() {
        for j in 0..fin.dim() {
            let (x, y) = (basis(i), basis(j));
            let xy = fin.mul(&x, &y);
            if let Some(xy) = &xy {
                alg.set_entry(Which::Product, i, j, vector_elem(xy, &one));
            }
            let parts = (fin.br(&x, &y), fin.mul(&y, &fin.apply_der(&x)), xy);
            if let (Some(b), Some(ydx), Some(xy)) = parts {
                let value = vector_elem(&b, &one)
                    .add(&vector_elem(&ydx, &d()))
                    .add(&vector_elem(&fin.apply_der(&xy), &lam()));
                alg.set_entry(Which::Bracket, i, j, value);
            }
        }
    }
    alg.locality_from_table();
    Ok(alg)
}

/// `PV_2` on `v1 .. v{max_exp}`:
/// `(v^n λ v^m) = v^{n+m}`, `[v^n λ v^m] = (n∂ + (n+m)λ) v^{n+m-1}`,
/// with entries beyond `max_exp` left undefined.
pub fn make_pv2(max_exp: usize) -> ConformalAlgebraDesc {
    let names: Vec<String> = (1..=max_exp).map(|i| format!("v{i}")).collect();
    let mut alg = ConformalAlgebraDesc::new("PV2", GeneratorSet::from_names(&names), Kind::Poisson);
    alg.partial = true;
    for n in 1..=max_exp {
        for m in 1..=max_exp {
            if n + m <= max_exp {
                alg.set_entry(Which::Product, n - 1, m - 1, HElement::gen(n + m - 1));
            }
            if n + m - 1 <= max_exp {
                let coeff = &d().scale(&int(n as i64)) + &lam().scale(&int((n + m) as i64));
                alg.set_entry(Which::Bracket, n - 1, m - 1, HElement::term(n + m - 2, coeff));
            }
        }
    }
    alg.locality_from_table();
    alg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;

    #[test]
    fn virasoro_table_by_n() {
        let vir = make_virasoro();
        let v = HElement::gen(0);
        let nth = |n| vir.nth_product(&v, &v, n, Which::Bracket).unwrap();
        assert_eq!(nth(0), HElement::term(0, d()));
        assert_eq!(nth(1), HElement::term(0, ExactPoly::from_int(2)));
        assert!(nth(2).is_zero());
        assert_eq!(vir.locality.get(0, 0), 2);
    }

    #[test]
    fn quadratic_recovers_weyl_table() {
        let fin = FinAlgebra::truncated_poly("v", 5, true);
        let q = make_quadratic(&fin).unwrap();
        for m in 0..5usize {
            for n in 0..5usize {
                let got = q.entry(Which::Bracket, m, n);
                if m + n == 0 {
                    assert!(got.unwrap().is_zero());
                    continue;
                }
                if m + n > 5 || m + n >= 5 {
                    continue;
                }
                let want = HElement::term(
                    m + n - 1,
                    &d().scale(&int(m as i64)) + &lam().scale(&int((n + m) as i64)),
                );
                assert_eq!(got.unwrap(), want, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn quadratic_with_zero_derivation_is_current() {
        let mut fin = FinAlgebra::truncated_poly("v", 3, false);
        fin.der = vec![Vec::new(); 3];
        let q = make_quadratic(&fin).unwrap();
        assert!(q.bracket.values().all(|e| e.is_zero()));
        assert_eq!(q.entry(Which::Product, 1, 1).unwrap(), HElement::gen(2));
        assert_eq!(q.entry(Which::Product, 2, 1).unwrap(), HElement::zero());
    }

    #[test]
    fn non_derivation_is_rejected() {
        // d/dv on the honest quotient k[v]/(v^3) fails on v * v^2 = 0
        let fin = FinAlgebra::truncated_poly("v", 3, false);
        assert!(make_quadratic(&fin).is_err());
    }

    #[test]
    fn pv2_entries() {
        let pv2 = make_pv2(6);
        let e = pv2.entry(Which::Bracket, 1, 2).unwrap();
        assert_eq!(e.coeff(3), "2*d + 5*l".parse().unwrap());
        assert!(matches!(pv2.entry(Which::Product, 3, 3), Err(Error::MissingEntry(..))));
        assert_eq!(e.degree_in(Var::L), 1);
    }
}
