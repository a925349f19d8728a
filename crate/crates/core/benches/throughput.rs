use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mwrc_core::channel::ChannelSpec;
use mwrc_core::fixtures;
use mwrc_core::par::Execution;
use mwrc_core::simulator::{run_sim, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn simulation(c: &mut Criterion) {
    let pmf = fixtures::xor_triple();
    let channel = ChannelSpec::noiseless(2, 3).unwrap();
    let mut group = c.benchmark_group("run_sim");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = SimConfig {
            execution,
            ..SimConfig::new(8, 1.3, 500, 1)
        };
        group.bench_with_input(BenchmarkId::new(name, "xor_m8"), &cfg, |b, cfg| {
            b.iter(|| run_sim(black_box(&pmf), &channel, cfg).unwrap())
        });
    }
    group.finish();
}

fn entropy_table(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pmf = fixtures::random_pmf(&mut rng, 10, 3);
    let mut group = c.benchmark_group("entropy_table");
    for (name, execution) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "l10"), &execution, |b, &exec| {
            b.iter(|| black_box(&pmf).entropy_table(exec))
        });
    }
    group.finish();
}

criterion_group!(benches, simulation, entropy_table);
criterion_main!(benches);
