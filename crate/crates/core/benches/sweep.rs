use criterion::{black_box, criterion_group, criterion_main, Criterion};
use toyworld_core::experiment::{run_experiment, ExperimentMode, ExperimentSpec};
use toyworld_core::oracle::{direct_field_z, FieldPotential};
use toyworld_core::par::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn life_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("life_tables");
    group.sample_size(10);
    for mode in [ExperimentMode::Quantum1, ExperimentMode::Quantum1Sp] {
        let spec = ExperimentSpec::new(mode, 13);
        for (name, exec) in MODES {
            group.bench_function(format!("{mode} N=13 {name}"), |b| {
                b.iter(|| black_box(run_experiment(&spec, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn field_integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_integral");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(format!("3 vertices {name}"), |b| {
            b.iter(|| black_box(direct_field_z(1.1, FieldPotential::Free, 3, 10.0, 800, exec).unwrap()))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let specs: Vec<ExperimentSpec> = [5, 9, 13]
        .into_iter()
        .flat_map(|n| ExperimentMode::ALL.map(|m| ExperimentSpec::new(m, n)))
        .collect();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(exec.try_map(&specs, |s| run_experiment(s, Execution::Sequential)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, life_tables, field_integral, sweep);
criterion_main!(benches);
