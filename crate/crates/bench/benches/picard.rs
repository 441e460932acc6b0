use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use quasifix_core::oracle::{discretized_remark, random_instance, Profile};
use quasifix_core::picard::{find_invariant_point, iterate, SearchConfig, SelectionRule};
use quasifix_core::qspace::{BuiltinMetric, Interval, ScalarSpace};
use quasifix_core::setmap::IntervalMap;

fn remark(c: &mut Criterion) {
    let s = ScalarSpace::new(BuiltinMetric::Remark46);
    let m = IntervalMap::zero_to_x(Interval::new(0.0, 1.0));
    let rule = SelectionRule::near_sup();
    let cfg = SearchConfig::continuous();
    c.bench_function("remark_search_from_one", |b| {
        b.iter(|| find_invariant_point(&m, &s, black_box(&1.0), &rule, &cfg).unwrap())
    });
}

fn grid_chain(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid_remark_iterate");
    for points in [50usize, 100, 200] {
        let (space, map, _) = discretized_remark(points, 1).unwrap();
        let rule = SelectionRule::near_sup();
        let cfg = SearchConfig::finite();
        g.bench_with_input(BenchmarkId::from_parameter(points), &points, |b, &k| {
            b.iter(|| iterate(&map, &space, black_box(&k), &rule, &cfg).unwrap())
        });
    }
    g.finish();
}

fn nested_instances(c: &mut Criterion) {
    let insts: Vec<_> = (0..32).map(|s| random_instance(8, s, Profile::Nested).unwrap()).collect();
    let rule = SelectionRule::near_sup();
    let cfg = SearchConfig::finite();
    c.bench_function("nested_n8_search_x32", |b| {
        b.iter(|| {
            for inst in &insts {
                black_box(find_invariant_point(&inst.map, &inst.space, &0, &rule, &cfg).unwrap());
            }
        })
    });
}

criterion_group!(benches, remark, grid_chain, nested_instances);
criterion_main!(benches);
