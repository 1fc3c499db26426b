use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qtraj::feedback::FeedbackLaw;
use qtraj::homodyne::{HomodyneConfig, Mode};
use qtraj::trajectory::{run_ensemble_with, Execution, SimConfig};

fn config(mode: Mode, trajectories: usize) -> SimConfig {
    let h = HomodyneConfig::from_alpha2(1e4, 1e-4, mode).unwrap();
    let law = FeedbackLaw::new(1.0, true).unwrap();
    SimConfig {
        steps: 500,
        trajectories,
        record_stride: 50,
        ..SimConfig::new(h, law, law.target())
    }
}

fn executions() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Execution::Parallel),
    ]
}

fn ensemble(c: &mut Criterion) {
    for mode in [Mode::Exact, Mode::FirstOrder] {
        let mut group = c.benchmark_group(format!("ensemble/{mode:?}"));
        group.sample_size(10);
        for trajectories in [256, 2048] {
            let cfg = config(mode, trajectories);
            for (name, execution) in executions() {
                group.bench_with_input(BenchmarkId::new(name, trajectories), &cfg, |b, cfg| {
                    b.iter(|| run_ensemble_with(black_box(cfg), execution).unwrap())
                });
            }
        }
        group.finish();
    }
}

criterion_group!(benches, ensemble);
criterion_main!(benches);
