use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use marsnet_core::astro::BodyParameters;
use marsnet_core::constellation::{default_ground_stations, generate_walker, WalkerConfig};
use marsnet_core::coverage::{coverage_report, time_steps, CoverageParams};
use marsnet_core::network::{build_plus_grid, snapshot_series};
use marsnet_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_coverage(c: &mut Criterion) {
    let body = BodyParameters::mars();
    let constellation = generate_walker(&WalkerConfig::default()).unwrap();
    let mut group = c.benchmark_group("coverage_report");
    group.sample_size(10);
    for (name, execution) in MODES {
        let params = CoverageParams {
            grid_deg: 4.0,
            execution,
            ..CoverageParams::with_window(900.0)
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &params, |b, p| {
            b.iter(|| coverage_report(&constellation, &body, p).unwrap())
        });
    }
    group.finish();
}

fn bench_snapshots(c: &mut Criterion) {
    let body = BodyParameters::mars();
    let constellation = generate_walker(&WalkerConfig::default()).unwrap();
    let topo = build_plus_grid(9, 9, false).unwrap();
    let stations = default_ground_stations();
    let times = time_steps(0.0, 3_000.0, 10.0).unwrap();
    let mut group = c.benchmark_group("snapshot_series");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| snapshot_series(&body, &constellation, &topo, &stations, &times, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_coverage, bench_snapshots);
criterion_main!(benches);
