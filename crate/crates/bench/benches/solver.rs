use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rshwc_core::gen::synthetic_graph;
use rshwc_core::{solve, ProblemInstance, PropagationConfig, SolverConfig};
use rshwc_harness::augment::{assemble_instance, augment, AugmentParams, InstanceParams};
use rshwc_harness::snap::RawGraph;

fn experiment_instance(n: usize, seed: u64) -> ProblemInstance {
    let graph = RawGraph {
        vertex_count: n,
        edges: synthetic_graph(n, 2 * n, seed),
    };
    let network = augment(
        &graph,
        &AugmentParams {
            rng_seed: seed,
            ..AugmentParams::default()
        },
    );
    assemble_instance(
        network,
        &InstanceParams {
            rng_seed: seed,
            ..InstanceParams::default()
        },
    )
}

fn config() -> SolverConfig {
    SolverConfig {
        propagation: PropagationConfig {
            mc_samples: 200,
            ..PropagationConfig::default()
        },
        ..SolverConfig::default()
    }
}

fn bench_solve_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in [500usize, 1000, 2000] {
        let instance = experiment_instance(n, 42);
        group.bench_with_input(BenchmarkId::from_parameter(n), &instance, |b, instance| {
            b.iter(|| black_box(solve(instance, &config()).unwrap()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solve_scaling);
criterion_main!(benches);
