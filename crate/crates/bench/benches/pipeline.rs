use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use threeweb_core::config::AnalysisConfig;
use threeweb_core::corpus;
use threeweb_core::exprlang::parse_expr;
use threeweb_core::invariants::classify;
use threeweb_core::involution::{admissible_dimension, character_table, Scenario, ScenarioId};
use threeweb_core::jets::jet_lift;
use threeweb_core::webframe::BasePoint;

fn bench_jet_lift(c: &mut Criterion) {
    let e = parse_expr("exp(x1 * y2) + x2 * y1 * y1 / (2 + x1)").unwrap();
    let p = BasePoint::new(0.3, -0.2, 0.9, 0.4);
    c.bench_function("jet_lift_order4", |b| {
        b.iter(|| jet_lift(black_box(&e), black_box(&p), 4).unwrap())
    });
}

fn bench_classify(c: &mut Criterion) {
    let cfg = AnalysisConfig::default();
    let web = corpus::generic_poly();
    let p = corpus::generic_point();
    c.bench_function("classify_generic_web", |b| {
        b.iter(|| classify(black_box(&web), black_box(&p), &cfg).unwrap())
    });
}

fn bench_involution(c: &mut Criterion) {
    c.bench_function("character_table_thm3", |b| {
        b.iter(|| character_table(black_box(ScenarioId::Thm3)))
    });
    let zeros = Scenario::get(ScenarioId::Thm8).zero_set;
    c.bench_function("admissible_dimension_thm8", |b| {
        b.iter(|| admissible_dimension(black_box(&zeros)))
    });
}

criterion_group!(benches, bench_jet_lift, bench_classify, bench_involution);
criterion_main!(benches);
