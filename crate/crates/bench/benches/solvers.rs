use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hjnet_bench::bench_network;
use hjnet_core::critical::{compute_weights, critical_value, distance_table, min_cycle_value};
use hjnet_core::dfe::{row_function, solve_critical, Trace};
use hjnet_core::extension::{maximal_subsolution_from_point, solve_on_arc, NetworkPoint};
use hjnet_core::fixtures;
use hjnet_core::numerics::SigmaProfile;
use hjnet_core::{ArcId, VertexId};

fn bench_critical_value(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_value");
    group.sample_size(10);
    let triangle = fixtures::triangle();
    group.bench_function("triangle", |b| {
        b.iter(|| critical_value(black_box(&triangle)).unwrap())
    });
    let net = bench_network();
    group.bench_function("eight_arcs", |b| {
        b.iter(|| critical_value(black_box(&net)).unwrap())
    });
    group.finish();
}

fn bench_weights_and_distances(c: &mut Criterion) {
    let net = bench_network();
    let a = critical_value(&net).unwrap() + 0.25;
    let mut group = c.benchmark_group("level");
    group.bench_function("compute_weights", |b| {
        b.iter(|| compute_weights(black_box(&net), black_box(a)).unwrap())
    });
    let w = compute_weights(&net, a).unwrap();
    group.bench_function("min_cycle_value", |b| {
        b.iter(|| min_cycle_value(net.graph(), black_box(&w)))
    });
    group.bench_function("distance_table", |b| {
        b.iter(|| distance_table(black_box(&net), black_box(&w)).unwrap())
    });
    group.finish();
}

fn bench_profiles(c: &mut Criterion) {
    let net = bench_network();
    let a = critical_value(&net).unwrap() + 0.5;
    let h = net.hamiltonian(ArcId(2));
    let tol = net.tolerances();
    let mut group = c.benchmark_group("profiles");
    group.bench_function("sigma_profile", |b| {
        b.iter(|| SigmaProfile::build(black_box(h), black_box(a), tol).unwrap())
    });
    let sp = SigmaProfile::build(h, a, tol).unwrap();
    let beta = 0.5 * (sp.total_plus() + sp.total_minus());
    group.bench_function("solve_on_arc", |b| {
        b.iter(|| solve_on_arc(black_box(h), a, 0.0, black_box(beta), 257, tol).unwrap())
    });
    group.finish();
}

fn bench_solves(c: &mut Criterion) {
    let net = fixtures::triangle();
    let cv = critical_value(&net).unwrap();
    let w = compute_weights(&net, cv).unwrap();
    let table = distance_table(&net, &w).unwrap();
    let trace = Trace::new(cv, vec![(VertexId(0), 0.0)]).unwrap();
    let mut group = c.benchmark_group("solves");
    group.bench_function("hopf_lax_critical", |b| {
        b.iter(|| solve_critical(black_box(&trace), black_box(&table), 1e-6).unwrap())
    });
    group.bench_function("row_function", |b| {
        b.iter(|| row_function(black_box(&table), VertexId(1)))
    });
    let bench_net = bench_network();
    let a = critical_value(&bench_net).unwrap() + 0.3;
    let y = NetworkPoint::new(&bench_net, ArcId(1), 0.4).unwrap();
    group.sample_size(10);
    group.bench_function("maximal_subsolution_from_point", |b| {
        b.iter(|| maximal_subsolution_from_point(black_box(&bench_net), &y, 0.0, a, 129).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_critical_value,
    bench_weights_and_distances,
    bench_profiles,
    bench_solves
);
criterion_main!(benches);
