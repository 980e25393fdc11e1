use confenv_core::poly::{d, lam, rat, ExactPoly, Exponents, Var};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = (Exponents, i64, i64)> {
    ([0u32..3, 0..3, 0..2, 0..3], -5i64..=5, 1i64..=4)
}

fn poly() -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec(term(), 0..5).prop_map(|ts| {
        let mut p = ExactPoly::zero();
        for (e, a, b) in ts {
            p.add_term(e, rat(a, b));
        }
        p
    })
}

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::D), Just(Var::L), Just(Var::M), Just(Var::X)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &ExactPoly::one(), p.clone());
        prop_assert!((&p * &ExactPoly::zero()).is_zero());
    }

    #[test]
    fn display_parses_back(p in poly()) {
        let back: ExactPoly = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn substitution_is_a_ring_map(p in poly(), q in poly(), r in poly(), v in var()) {
        let r = r.substitute(v, &ExactPoly::zero());
        prop_assert_eq!((&p * &q).substitute(v, &r), &p.substitute(v, &r) * &q.substitute(v, &r));
        prop_assert_eq!((&p + &q).substitute(v, &r), &p.substitute(v, &r) + &q.substitute(v, &r));
    }

    #[test]
    fn reflection_is_an_involution(p in poly()) {
        // λ ↦ −∂−λ
        let refl = &-d() - &lam();
        prop_assert_eq!(p.substitute(Var::L, &refl).substitute(Var::L, &refl), p);
    }

    #[test]
    fn coefficients_reconstruct(p in poly(), v in var(), divided in any::<bool>()) {
        let mut acc = ExactPoly::zero();
        for k in 0..=p.degree_in(v) {
            let c = p.coefficient_of(v, k, divided);
            let basis = if divided {
                ExactPoly::var(v).divided_pow(k)
            } else {
                ExactPoly::var_pow(v, k)
            };
            acc += &(&c * &basis);
        }
        prop_assert_eq!(acc, p);
    }
}
