use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tariffnet_bench::{att25_table, config};
use tariffnet_core::{optimize_pricing, run_scenario, sweep, CascadeMode, Delivery};

fn optimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_pricing");
    group.sample_size(10);
    for ped in [0.2, 2.0] {
        let (topo, econ, table) = att25_table(ped);
        group.bench_function(format!("att25 ped={ped}"), |b| {
            b.iter(|| {
                optimize_pricing(
                    black_box(&table),
                    &topo,
                    &econ,
                    Delivery::Cloud,
                    CascadeMode::Strict,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("run_scenario att25 ped=2", |b| {
        let cfg = config(2.0);
        b.iter(|| run_scenario(black_box(&cfg)).unwrap())
    });
    group.bench_function("sweep att25 six equal PEDs", |b| {
        let cfg = config(0.2);
        let peds = [0.2, 0.4, 0.6, 0.8, 1.0, 2.0].map(|p| [p; 3]);
        b.iter(|| sweep(black_box(&cfg), &peds).unwrap())
    });
    group.finish();
}

criterion_group!(benches, optimizer, pipeline);
criterion_main!(benches);
