use criterion::{criterion_group, criterion_main, Criterion};
use polymix::stress_strength::{reliability_quadrature, reliability_series};
use polymix::{build_named, SeriesControl};

fn stress_strength(c: &mut Criterion) {
    let ctl = SeriesControl::default();
    let pairs = [
        ("lindley3_vs_akash1", build_named("lindley", &[3.0]).unwrap(), build_named("akash", &[1.0]).unwrap()),
        ("akash1_vs_lindley2", build_named("akash", &[1.0]).unwrap(), build_named("lindley", &[2.0]).unwrap()),
        ("devya1_vs_om1", build_named("devya", &[1.0]).unwrap(), build_named("om", &[1.0]).unwrap()),
    ];
    let mut group = c.benchmark_group("reliability");
    for (label, x, y) in &pairs {
        group.bench_function(format!("series/{label}"), |b| b.iter(|| reliability_series(x, y, &ctl)));
        group.bench_function(format!("quadrature/{label}"), |b| b.iter(|| reliability_quadrature(x, y, 1e-10)));
    }
    group.finish();
}

criterion_group!(benches, stress_strength);
criterion_main!(benches);
