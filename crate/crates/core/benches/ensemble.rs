use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use collapse_core::stochastic::{ensemble_run, EnsembleConfig, NoiseModel, DEFAULT_MAX_PLAYS};
use collapse_core::Execution;

fn modes() -> Vec<Execution> {
    #[cfg_attr(not(feature = "parallel"), allow(unused_mut))]
    let mut modes = vec![Execution::Sequential];
    #[cfg(feature = "parallel")]
    modes.push(Execution::Parallel);
    modes
}

fn bench_ensembles(c: &mut Criterion) {
    let cases = [
        ("double-or-nothing", NoiseModel::DoubleOrNothing, 100_000u64),
        (
            "fixed-stake-0.05",
            NoiseModel::FixedStake { stake: 0.05 },
            10_000,
        ),
    ];
    for (name, model, n) in cases {
        let mut group = c.benchmark_group(format!("ensemble/{name}"));
        group.throughput(Throughput::Elements(n));
        group.sample_size(10);
        let cfg = EnsembleConfig {
            model,
            x0: 0.3,
            tau_c: 1.0,
            level_energy: 1.0,
            n,
            master_seed: 42,
            max_plays: DEFAULT_MAX_PLAYS,
        };
        for exec in modes() {
            group.bench_with_input(
                BenchmarkId::from_parameter(format!("{exec:?}")),
                &cfg,
                |b, cfg| b.iter(|| ensemble_run(cfg, exec).unwrap()),
            );
        }
        group.finish();
    }
}

criterion_group!(benches, bench_ensembles);
criterion_main!(benches);
