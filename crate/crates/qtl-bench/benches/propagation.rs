use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qtl_bench::{canonical_2x3, canonical_5x5, hamiltonian, initial_state, micro_2x50};
use qtl_core::Propagator;

fn bench_diagonalization(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagonalize");
    group.sample_size(10);
    for (name, composite) in [
        ("dim100", micro_2x50()),
        ("dim700", canonical_2x3()),
        ("dim930", canonical_5x5()),
    ] {
        let h = hamiltonian(&composite, 0.0075, 1);
        group.bench_function(name, |b| b.iter(|| Propagator::new(black_box(&h)).unwrap()));
    }
    group.finish();
}

fn bench_trajectory(c: &mut Criterion) {
    let mut group = c.benchmark_group("trajectory_1000_samples");
    group.sample_size(10);
    for (name, composite) in [("dim100", micro_2x50()), ("dim700", canonical_2x3())] {
        let h = hamiltonian(&composite, 0.0075, 1);
        let prop = Propagator::new(&h).unwrap();
        let psi0 = initial_state(&composite, 2);
        let times: Vec<f64> = (0..1000).map(|k| 0.2 * k as f64).collect();
        group.bench_function(name, |b| {
            b.iter(|| {
                prop.trajectory(black_box(&composite), black_box(&psi0), &times, None)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_diagonalization, bench_trajectory);
criterion_main!(benches);
