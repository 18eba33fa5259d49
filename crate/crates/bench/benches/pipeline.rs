use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use upoly_bench::spider;
use upoly_core::generate::enumerate_trees;
use upoly_core::{
    canonicalize_free, good_encode, m_count, u_polynomial, ContainmentTable, Expression, Procedure1, Situation,
    UMode, Weight,
};

fn u_polynomial_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("u_polynomial");
    for legs in [3, 4] {
        let t = spider(legs, 3);
        group.bench_with_input(BenchmarkId::new("dp", t.n()), &t, |b, t| {
            b.iter(|| u_polynomial(black_box(t), UMode::Dp).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("brute", t.n()), &t, |b, t| {
            b.iter(|| u_polynomial(black_box(t), UMode::Brute).unwrap())
        });
    }
    group.finish();
}

fn canonical_codes(c: &mut Criterion) {
    let trees = enumerate_trees(10).unwrap();
    c.bench_function("canonicalize_free/all n=10", |b| {
        b.iter(|| trees.iter().map(|t| canonicalize_free(black_box(t))).collect::<Vec<_>>())
    });
}

fn encoding(c: &mut Criterion) {
    let t = spider(3, 2);
    c.bench_function("good_encode/spider 3x2", |b| b.iter(|| good_encode(black_box(&t)).unwrap()));
}

fn occurrence_counting(c: &mut Criterion) {
    let t = spider(3, 3);
    let s: Situation = "1(1);1(1)".parse().unwrap();
    let tbl = ContainmentTable::for_situation(&t, &s).unwrap();
    c.bench_function("m_count/spider 3x3", |b| b.iter(|| m_count(black_box(&t), &s, &tbl).unwrap()));

    let e = Expression::from_u64(&[5, 2, 2, 1]).unwrap();
    let j = Weight::from(5u32);
    c.bench_function("procedure1/spider 3x3", |b| {
        b.iter(|| Procedure1::new(black_box(&t)).unwrap().counts(&j, &e).unwrap())
    });
}

criterion_group!(benches, u_polynomial_modes, canonical_codes, encoding, occurrence_counting);
criterion_main!(benches);
