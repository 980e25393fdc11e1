#![allow(dead_code)]

use std::collections::BTreeSet;

use confenv_core::envelope::Envelope;
use confenv_core::ops::{poly_add_all, Letter, Mono, OpPoly};
use confenv_core::poly::rat;
use Letter::{Gen, D, L};

pub const V: usize = 0;
pub const G: usize = 1;

fn lin(env: &Envelope, terms: Vec<(i64, i64, Vec<Letter>)>) -> OpPoly {
    let mut p = OpPoly::new();
    for (a, b, ls) in terms {
        poly_add_all(&mut p, &env.word(&ls), &rat(a, b));
    }
    p
}

fn ds(s: u32, x: usize) -> Vec<Letter> {
    let mut l = vec![D; s as usize];
    l.push(Gen(x));
    l
}

fn pre(a: Letter, s: u32, x: usize) -> Vec<Letter> {
    let mut l = vec![a];
    l.extend(ds(s, x));
    l
}

/// The K₁ Gröbner–Shirshov relations `lhs → rhs`, the `∂^s` families up to `max_s`.
pub fn k1_gsb_relations(env: &Envelope, max_s: u32) -> Vec<(String, OpPoly, OpPoly)> {
    let (v, g) = (V, G);
    let w = |ls: &[Letter]| env.word(ls);
    let mut rels = vec![
        ("L2^v v".to_string(), w(&[L(2, v), Gen(v)]), lin(env, vec![(-2, 1, vec![L(1, g), Gen(g)])])),
        (
            "L1^v v".into(),
            w(&[L(1, v), Gen(v)]),
            lin(env, vec![(-2, 1, vec![L(0, g), Gen(g)]), (1, 2, vec![Gen(v)])]),
        ),
        (
            "L1^g v".into(),
            w(&[L(1, g), Gen(v)]),
            lin(env, vec![(-1, 1, vec![L(1, v), Gen(g)]), (3, 2, vec![Gen(g)])]),
        ),
        (
            "L1^v L1^v g".into(),
            w(&[L(1, v), L(1, v), Gen(g)]),
            lin(env, vec![(3, 2, vec![L(1, v), Gen(g)]), (-1, 2, vec![Gen(g)])]),
        ),
        (
            "L1^v L1^g g".into(),
            w(&[L(1, v), L(1, g), Gen(g)]),
            lin(env, vec![(1, 2, vec![L(1, g), Gen(g)])]),
        ),
        (
            "L0^g L1^v g".into(),
            w(&[L(0, g), L(1, v), Gen(g)]),
            lin(
                env,
                vec![(1, 2, vec![L(0, v), L(1, g), Gen(g)]), (1, 2, vec![L(0, g), Gen(g)])],
            ),
        ),
        (
            "L0^g L1^g g".into(),
            w(&[L(0, g), L(1, g), Gen(g)]),
            lin(env, vec![(-1, 2, vec![L(1, v), Gen(g)]), (1, 4, vec![Gen(g)])]),
        ),
    ];
    for s in 1..=max_s {
        let si = s as i64;
        rels.push((
            format!("L1^v d^{s} v"),
            w(&pre(L(1, v), s, v)),
            lin(
                env,
                vec![(-2, 1, pre(L(0, g), s, g)), (1, 2, ds(s, v)), (si, 1, pre(L(0, v), s - 1, v))],
            ),
        ));
        rels.push((
            format!("L1^g d^{s} v"),
            w(&pre(L(1, g), s, v)),
            lin(
                env,
                vec![(-1, 1, pre(L(0, v), s - 1, g)), (1, 1, ds(s, g)), (si + 1, 1, pre(L(0, g), s - 1, v))],
            ),
        ));
        rels.push((
            format!("L1^v d^{s} g"),
            w(&pre(L(1, v), s, g)),
            lin(
                env,
                vec![(-1, 1, pre(L(0, g), s - 1, v)), (1, 2, ds(s, g)), (si + 1, 1, pre(L(0, v), s - 1, g))],
            ),
        ));
        rels.push((
            format!("L1^g d^{s} g"),
            w(&pre(L(1, g), s, g)),
            lin(env, vec![(si + 2, 1, pre(L(0, g), s - 1, g)), (1, 2, ds(s - 1, v))]),
        ));
    }
    rels
}

fn key(env: &Envelope, ls: Vec<Letter>) -> Mono {
    env.monomial_order().key(&ls)
}

fn l0v(n: u32) -> Vec<Letter> {
    vec![L(0, V); n as usize]
}

/// `(L₀ᵛ)ⁿ∂ˢx`, `(L₀ᵛ)ⁿL₀ᵍ∂ˢx`, `(L₀ᵛ)ⁿL₁ˣg` with X-degree ≤ `deg`, `s ≤ dpow`.
pub fn k1_reduced_families(env: &Envelope, deg: u32, dpow: u32) -> BTreeSet<Mono> {
    let mut out = BTreeSet::new();
    for x in [V, G] {
        for n in 0..deg {
            for s in 0..=dpow {
                if n < deg {
                    let mut w = l0v(n);
                    w.extend(ds(s, x));
                    out.insert(key(env, w));
                }
                if n + 2 <= deg {
                    let mut w = l0v(n);
                    w.push(L(0, G));
                    w.extend(ds(s, x));
                    out.insert(key(env, w));
                }
            }
            if n + 2 <= deg {
                let mut w = l0v(n);
                w.extend([L(1, x), Gen(G)]);
                out.insert(key(env, w));
            }
        }
    }
    out
}

/// `L₀ⁿ∂ˢL₁ᵐv` and `L₀ⁿL₁ᵐL₂v` with X-degree ≤ `deg`, `s ≤ dpow`. `L₀` commutes
/// with `∂`, so the first family is spelled `∂ˢL₀ⁿL₁ᵐv` as the standard order
/// keeps `∂` leftmost.
pub fn vir3_basis(env: &Envelope, deg: u32, dpow: u32) -> BTreeSet<Mono> {
    let mut out = BTreeSet::new();
    for n in 0..deg {
        for m in 0..deg - n {
            for s in 0..=dpow {
                let mut w = vec![D; s as usize];
                w.extend(l0v(n));
                w.extend(vec![L(1, V); m as usize]);
                w.push(Gen(V));
                out.insert(key(env, w));
            }
            if n + m + 2 <= deg {
                let mut w = l0v(n);
                w.extend(vec![L(1, V); m as usize]);
                w.extend([L(2, V), Gen(V)]);
                out.insert(key(env, w));
            }
        }
    }
    out
}

/// Random module words over the given letters, ending in a generator.
pub fn random_element<R: rand::Rng>(
    env: &Envelope,
    letters: &[Letter],
    max_len: usize,
    terms: usize,
    rng: &mut R,
) -> OpPoly {
    let ngens = env.gens().len();
    let mut p = OpPoly::new();
    for _ in 0..terms {
        let len = rng.gen_range(0..=max_len);
        let mut w: Vec<Letter> = (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        w.push(Gen(rng.gen_range(0..ngens)));
        let num = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        let c = rat(num, rng.gen_range(1..=3));
        poly_add_all(&mut p, &env.word(&w), &c);
    }
    p
}
