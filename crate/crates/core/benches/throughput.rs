//! Sequential against data-parallel execution for the hot paths: per-point
//! refinement inside the pipeline, QAP restarts, and whole experiment grids.
//!
//! `cargo bench -p circloc` compares both; with `--no-default-features` the
//! parallel arms fall back to sequential execution.

use std::hint::black_box;

use circloc::estimators::{localize_and_refine, solve_qap_with, Initializer, LocalSearch, PipelineOptions, QapStrategy};
use circloc::experiments::{run_experiment, ExperimentSpec, Variant};
use circloc::model::{generate_matrix, sample_positions, BuiltinModel, NoiseSpec, PositionMode};
use circloc::par::Execution;
use circloc::rng::{stream, Purpose};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn instance(n: usize) -> circloc::AffinityMatrix {
    let x = sample_positions(n, PositionMode::Uniform, &mut stream(1, Purpose::Positions)).unwrap();
    generate_matrix(&x, &BuiltinModel::Affine.model(), NoiseSpec::gaussian(0.1), &mut stream(1, Purpose::Noise)).unwrap()
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for n in [256, 512] {
        let a = instance(n);
        for (name, execution) in MODES {
            let opts = PipelineOptions { execution, ..PipelineOptions::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &a, |b, a| {
                b.iter(|| localize_and_refine(black_box(a), &opts, 7).unwrap())
            });
        }
    }
    group.finish();
}

fn qap_restarts(c: &mut Criterion) {
    let mut group = c.benchmark_group("qap_local_search");
    group.sample_size(10);
    let a = instance(64);
    let strategy = QapStrategy::LocalSearch(LocalSearch { restarts: 16, max_sweeps: 50 });
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| solve_qap_with(black_box(&a), strategy, &mut stream(3, Purpose::Qap), execution).unwrap())
        });
    }
    group.finish();
}

fn experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    let spec = ExperimentSpec {
        n_values: vec![128],
        model: BuiltinModel::Logit,
        noise: NoiseSpec::gaussian(0.1),
        variants: vec![
            Variant::NO_SPLIT,
            Variant { split: true, initializer: Initializer::Qap, refine: true },
        ],
        seeds: 16,
        master_seed: 11,
        positions: PositionMode::Uniform,
        qap: QapStrategy::default(),
        refine_grid: Default::default(),
    };
    for (name, execution) in MODES {
        group.bench_function(name, |b| b.iter(|| run_experiment(black_box(&spec), execution).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, pipeline, qap_restarts, experiment);
criterion_main!(benches);
