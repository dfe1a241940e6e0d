use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sl2r_core::ode::{integrate, IntegratorConfig};
use sl2r_core::translator::{cmc_consistency_check, AutonomousSystem};

fn integrators(c: &mut Criterion) {
    let cfg = IntegratorConfig::default();
    c.bench_function("rk45 autonomous system s in [0, 20]", |b| {
        b.iter(|| {
            integrate(
                &AutonomousSystem,
                black_box(&[1.0, 0.0]),
                (0.0, 20.0),
                &cfg,
                &[],
            )
        })
    });
    let rk4 = IntegratorConfig::rk4(1e-2);
    c.bench_function("rk4 autonomous system s in [0, 20]", |b| {
        b.iter(|| {
            integrate(
                &AutonomousSystem,
                black_box(&[1.0, 0.0]),
                (0.0, 20.0),
                &rk4,
                &[],
            )
        })
    });
    c.bench_function("cmc consistency sweep H = 0.5", |b| {
        b.iter(|| cmc_consistency_check(black_box(0.5)))
    });
}

criterion_group!(benches, integrators);
criterion_main!(benches);
