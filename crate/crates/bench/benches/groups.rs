use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use vcl_core::homology::HomologyRep;
use vcl_core::matgroup::image_group;
use vcl_core::presentation::{parse_word_list, Family};
use vcl_core::star::star_decide;
use vcl_core::surfaces::build;
use vcl_core::wohlfahrt::{
    minimal_congruence_levels, todd_coxeter, CosetGraph, TEN_COSET_EXAMPLE, TEN_COSET_GENERATORS,
};

const CAP: usize = 2_000_000;

fn x5() -> HomologyRep {
    HomologyRep::for_surface(&build(Family::DoubleNGon, 5).unwrap(), None).unwrap()
}

fn closure(c: &mut Criterion) {
    let rep = x5();
    let mut group = c.benchmark_group("closure");
    group.sample_size(10);
    for a in [2u32, 4, 8] {
        group.bench_function(format!("Q{a}(X5)"), |b| {
            b.iter(|| image_group(&rep, black_box(a), CAP).unwrap().len())
        });
    }
    group.finish();
}

fn cosets(c: &mut Criterion) {
    let words = parse_word_list(TEN_COSET_GENERATORS).unwrap();
    c.bench_function("todd_coxeter ten cosets", |b| {
        b.iter(|| todd_coxeter(Family::DoubleNGon, 5, black_box(&words), 1000).unwrap())
    });
}

fn star(c: &mut Criterion) {
    c.bench_function("star_decide n=13 a=2..40", |b| {
        b.iter(|| {
            (2..40u64)
                .filter(|&a| star_decide(13, black_box(a)).unwrap().holds)
                .count()
        })
    });
}

fn levels(c: &mut Criterion) {
    let rep = x5();
    let g = CosetGraph::parse(TEN_COSET_EXAMPLE).unwrap();
    let mut group = c.benchmark_group("levels");
    group.sample_size(10);
    group.bench_function("minimal levels up to 48", |b| {
        b.iter(|| minimal_congruence_levels(&rep, &g, 48, CAP).unwrap())
    });
    group.finish();
}

criterion_group!(benches, closure, cosets, star, levels);
criterion_main!(benches);
