use confenv_core::cend::{cend_product_at, CendElement};
use confenv_core::poly::{lam, mu, rat, ExactPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_entry(rng: &mut ChaCha8Rng) -> ExactPoly {
    let mut p = ExactPoly::zero();
    for _ in 0..rng.gen_range(0..3) {
        let e = [rng.gen_range(0..2), 0, 0, rng.gen_range(0..3)];
        p.add_term(e, rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
    }
    p
}

fn random_matrix(rng: &mut ChaCha8Rng) -> CendElement {
    let rows = (0..2).map(|_| (0..2).map(|_| random_entry(rng)).collect()).collect();
    CendElement::from_rows(rows).unwrap()
}

#[test]
fn lambda_associativity_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let lm = &lam() + &mu();
    for _ in 0..50 {
        let (f, g, h) = (random_matrix(&mut rng), random_matrix(&mut rng), random_matrix(&mut rng));
        // (f λ (g μ h)) = ((f λ g) λ+μ h)
        let left = cend_product_at(&f, &cend_product_at(&g, &h, &mu()).unwrap(), &lam()).unwrap();
        let right = cend_product_at(&cend_product_at(&f, &g, &lam()).unwrap(), &h, &lm).unwrap();
        assert_eq!(left, right, "f = {f}, g = {g}, h = {h}");
    }
}

#[test]
fn identity_is_not_a_unit() {
    // (1 λ f) = f(∂+λ, x+λ): the identity matrix is not a left unit of Cend
    let x = CendElement::from_rows(vec![vec![ExactPoly::var(confenv_core::poly::Var::X)]]).unwrap();
    let p = cend_product_at(&CendElement::identity(1), &x, &lam()).unwrap();
    assert_eq!(p.get(0, 0).to_string(), "x + l");
}
