use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use quasifix_core::oracle::{metric_closure, property_sweep, random_instance, Profile, Property};
use quasifix_core::qspace::check_axioms;

fn generation(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_instance");
    for n in [4usize, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                random_instance(n, seed, Profile::Nested).unwrap()
            })
        });
    }
    g.finish();
}

fn closure_and_axioms(c: &mut Criterion) {
    let inst = random_instance(8, 3, Profile::Arbitrary).unwrap();
    let m: Vec<Vec<f64>> = inst.space.matrix().to_vec();
    c.bench_function("metric_closure_n8", |b| {
        b.iter(|| {
            let mut x = m.clone();
            metric_closure(black_box(&mut x));
            x
        })
    });
    c.bench_function("check_axioms_n8", |b| b.iter(|| check_axioms(black_box(&inst.space))));
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("property_sweep_50");
    g.sample_size(10);
    for p in [Property::Prop42, Property::Thm45, Property::ReductionQiu, Property::ReductionKq] {
        g.bench_function(p.name(), |b| b.iter(|| property_sweep(p, 50, (2, 6), 1).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, generation, closure_and_axioms, sweeps);
criterion_main!(benches);
