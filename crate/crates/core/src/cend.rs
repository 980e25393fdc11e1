//! `Cend_n`: n×n matrices over `𝕜[∂, x]` with
//! `(f λ g) = f(−λ, x) g(∂+λ, x+λ)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{d, lam, rat, sign, xv, ExactPoly, Var};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CendElement {
    size: usize,
    entries: Vec<ExactPoly>,
}

impl CendElement {
    pub fn zero(size: usize) -> Self {
        Self {
            size,
            entries: vec![ExactPoly::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.set(i, i, ExactPoly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExactPoly>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(Error::Invalid("Cend element must be a nonempty square matrix".into()));
        }
        Ok(Self {
            size,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactPoly {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: ExactPoly) {
        self.entries[i * self.size + j] = p;
    }

    pub fn entries(&self) -> &[ExactPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn map(&self, f: impl Fn(&ExactPoly) -> ExactPoly) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale_poly(&self, p: &ExactPoly) -> Self {
        self.map(|e| e * p)
    }

    /// Action of `∂` (multiplication by the variable).
    pub fn apply_d(&self) -> Self {
        self.scale_poly(&d())
    }

    /// Parity in the `M_{1|1}` grading: diagonal even, off-diagonal odd.
    /// `None` for a mixed element.
    pub fn parity(&self) -> Option<bool> {
        let mut diag = false;
        let mut off = false;
        for i in 0..self.size {
            for j in 0..self.size {
                if !self.get(i, j).is_zero() {
                    if i == j {
                        diag = true;
                    } else {
                        off = true;
                    }
                }
            }
        }
        match (diag, off) {
            (true, true) => None,
            (_, off) => Some(off),
        }
    }

    /// Coefficient of `λ^(n)` entrywise.
    pub fn coefficient_of(&self, var: Var, n: u32, divided: bool) -> Self {
        self.map(|e| e.coefficient_of(var, n, divided))
    }

    /// Entries `(1,1)` and `(1,2)` divisible by `x` (rank 2 only).
    pub fn in_cend2q_shape(&self) -> bool {
        self.size == 2
            && (0..2).all(|j| self.get(0, j).terms().all(|(e, _)| e[Var::X as usize] >= 1))
    }
}

impl fmt::Display for CendElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.size {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.size {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for CendElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cend{self}")
    }
}

/// `(f_ν g) = f(−ν, x) · g(∂+ν, x+ν)`; `ν` may contain `∂`.
pub fn cend_product_at(f: &CendElement, g: &CendElement, nu: &ExactPoly) -> Result<CendElement> {
    if f.size != g.size {
        return Err(Error::Invalid(format!(
            "Cend size mismatch: {} vs {}",
            f.size, g.size
        )));
    }
    let n = f.size;
    let minus_nu = -nu;
    let d_shift = &d() + nu;
    let x_shift = &xv() + nu;
    let fl: Vec<ExactPoly> = f.entries.iter().map(|e| e.substitute(Var::D, &minus_nu)).collect();
    let gr: Vec<ExactPoly> = g
        .entries
        .iter()
        .map(|e| e.substitute_many(&[Some(&d_shift), None, None, Some(&x_shift)]))
        .collect();
    let mut out = CendElement::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ExactPoly::zero();
            for k in 0..n {
                acc += &(&fl[i * n + k] * &gr[k * n + j]);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

pub fn cend_lambda_product(f: &CendElement, g: &CendElement) -> Result<CendElement> {
    cend_product_at(f, g, &lam())
}

/// `{f λ g} = (f_{−∂−λ} g) = f(∂+λ, x) g(−λ, x−∂−λ)`.
pub fn cend_conjugate(f: &CendElement, g: &CendElement) -> Result<CendElement> {
    cend_product_at(f, g, &(-&d() - lam()))
}

/// `[f_ν g] = (f_ν g) − (−1)^{|f||g|} (g_{−∂−ν} f)`.
pub fn cend_commutator_at(f: &CendElement, g: &CendElement, nu: &ExactPoly) -> Result<CendElement> {
    let odd = f.parity().unwrap_or(false) && g.parity().unwrap_or(false);
    let direct = cend_product_at(f, g, nu)?;
    let conj = cend_product_at(g, f, &(-&d() - nu))?;
    Ok(direct.sub(&conj.map(|e| e.scale(&sign(odd)))))
}

pub fn cend_bracket(f: &CendElement, g: &CendElement) -> Result<CendElement> {
    cend_commutator_at(f, g, &lam())
}

/// Image of `v` in `Cend_2`: `diag(x, x − ½∂)`.
pub fn cend2_v() -> CendElement {
    let x = xv();
    let lower = &x - &d().scale(&rat(1, 2));
    CendElement::from_rows(vec![vec![x, ExactPoly::zero()], vec![ExactPoly::zero(), lower]])
        .expect("square")
}

/// Image of `g` in `Cend_2`: `½ [[0, x], [−1, 0]]`.
pub fn cend2_g() -> CendElement {
    CendElement::from_rows(vec![
        vec![ExactPoly::zero(), xv().scale(&rat(1, 2))],
        vec![ExactPoly::constant(rat(-1, 2)), ExactPoly::zero()],
    ])
    .expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ExactPoly {
        s.parse().unwrap()
    }

    #[test]
    fn unit_times_x() {
        let one = CendElement::identity(1);
        let x = CendElement::from_rows(vec![vec![xv()]]).unwrap();
        let r = cend_lambda_product(&one, &x).unwrap();
        assert_eq!(r.get(0, 0), &p("x + l"));
        let bad = CendElement::identity(2);
        assert!(cend_lambda_product(&one, &bad).is_err());
    }

    #[test]
    fn k1_table_in_cend2() {
        let (v, g) = (cend2_v(), cend2_g());
        let vv = cend_bracket(&v, &v).unwrap();
        assert_eq!(vv, v.scale_poly(&p("d + 2*l")));
        let gv = cend_bracket(&g, &v).unwrap();
        assert_eq!(gv, g.scale_poly(&p("1/2*d + 3/2*l")));
        let vg = cend_bracket(&v, &g).unwrap();
        assert_eq!(vg, g.scale_poly(&p("d + 3/2*l")));
        let gg = cend_bracket(&g, &g).unwrap();
        assert_eq!(gg, v.scale_poly(&p("-1/2")));
    }

    #[test]
    fn conjugate_matches_displayed_substitution() {
        let (v, g) = (cend2_v(), cend2_g());
        let c = cend_conjugate(&g, &v).unwrap();
        // g(∂+λ, x) v(−λ, x−∂−λ), entry (1,2): ½x · (x−∂−λ + ½λ)
        assert_eq!(c.get(0, 1), &p("1/2*x^2 - 1/2*d*x - 1/4*l*x"));
    }

    #[test]
    fn shape_and_parity() {
        assert!(cend2_v().in_cend2q_shape());
        assert!(cend2_g().in_cend2q_shape());
        assert_eq!(cend2_g().parity(), Some(true));
        assert_eq!(cend2_v().parity(), Some(false));
        assert!(!CendElement::identity(2).in_cend2q_shape());
    }
}
