//! Sequential versus parallel execution of the data-parallel kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use homalg::graphs::simple_graphs_up_to;
use homalg::hom::hom_with;
use homalg::random;
use homalg::tensor::build_n;
use homalg::{Exec, FieldSpec, LabeledGraph, Limits, WeightedGraph};

fn limits(exec: Exec) -> Limits {
    Limits {
        exec,
        ..Limits::default()
    }
}

fn target(m: usize) -> WeightedGraph {
    random::generic_weighted_graph(&mut random::rng(m as u64), FieldSpec::rationals(), m, false)
}

/// A 7-vertex cycle with a chord: one connected component, so the whole
/// enumeration is one parallel split.
fn pattern() -> LabeledGraph {
    let mut edges: Vec<(usize, usize, u64)> = (0..7)
        .map(|i| (i, (i + 1) % 7, 1))
        .map(|(u, v, m)| (u.min(v), u.max(v), m))
        .collect();
    edges.push((0, 3, 1));
    LabeledGraph::new(false, 0, 7, edges).expect("valid pattern")
}

fn bench_hom(c: &mut Criterion) {
    let mut group = c.benchmark_group("hom_single_component");
    let g = pattern();
    for m in [4, 6] {
        let h = target(m);
        for exec in [Exec::Sequential, Exec::Parallel] {
            let l = limits(exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), m), &h, |b, h| {
                b.iter(|| hom_with(black_box(&g), black_box(h), &l).expect("within budget"))
            });
        }
    }
    group.finish();
}

fn bench_build_n(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_n");
    let h = target(4);
    for k in [1, 2] {
        let columns = simple_graphs_up_to(k, 2, false).expect("small catalogue");
        for exec in [Exec::Sequential, Exec::Parallel] {
            let l = limits(exec);
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), k),
                &columns,
                |b, cols| b.iter(|| build_n(black_box(&h), k, cols, &l).expect("within budget")),
            );
        }
    }
    group.finish();
}

fn bench_signatures(c: &mut Criterion) {
    let mut group = c.benchmark_group("signature_batch");
    let patterns = simple_graphs_up_to(0, 5, false).expect("small catalogue");
    let targets: Vec<WeightedGraph> = (0..64).map(|i| target(1 + i % 3)).collect();
    for exec in [Exec::Sequential, Exec::Parallel] {
        let l = limits(Exec::Sequential);
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| {
                exec.map(&targets, |h| {
                    patterns
                        .iter()
                        .map(|g| hom_with(g, h, &l).expect("within budget"))
                        .collect::<Vec<_>>()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hom, bench_build_n, bench_signatures);
criterion_main!(benches);
