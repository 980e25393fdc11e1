use confenv_bench::{dense_poly, small_bounds};
use confenv_core::cend::{cend_product_at, CendElement};
use confenv_core::conformal::{check_axioms, make_neveu_schwarz};
use confenv_core::envelope::{k1_envelope, pk10_table, virasoro_envelope};
use confenv_core::poly::{lam, ExactPoly, Var};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn poly(c: &mut Criterion) {
    let p = dense_poly(6);
    let q = dense_poly(5);
    c.bench_function("poly mul deg 6 x 5", |b| b.iter(|| black_box(&p) * black_box(&q)));
    let r = &lam() + &ExactPoly::var(Var::D);
    c.bench_function("poly substitute", |b| b.iter(|| black_box(&p).substitute(Var::L, &r)));
}

fn cend(c: &mut Criterion) {
    let x = ExactPoly::var(Var::X);
    let m = CendElement::from_rows(vec![vec![x.pow(3), x.clone()], vec![x.pow(2), ExactPoly::one()]]).unwrap();
    c.bench_function("cend2 lambda product", |b| b.iter(|| cend_product_at(&m, &m, &lam()).unwrap()));
}

fn completion(c: &mut Criterion) {
    let mut g = c.benchmark_group("completion");
    g.sample_size(10);
    g.bench_function("vir3 deg 5", |b| b.iter(|| virasoro_envelope(3, &small_bounds(5, 3, 4)).unwrap()));
    g.bench_function("k1 deg 4", |b| b.iter(|| k1_envelope(&small_bounds(4, 3, 3)).unwrap()));
    g.finish();
}

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("tables");
    g.sample_size(10);
    g.bench_function("pk10 cap 3", |b| b.iter(|| pk10_table(3).unwrap()));
    let k1 = make_neveu_schwarz();
    g.bench_function("k1 axioms", |b| b.iter(|| check_axioms(&k1, 1)));
    g.finish();
}

criterion_group!(benches, poly, cend, completion, tables);
criterion_main!(benches);
