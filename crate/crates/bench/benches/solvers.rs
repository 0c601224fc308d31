use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dagcut_bench::{ghz, reduction_instances, small_dags};
use dagcut_core::circuit::CircuitDag;
use dagcut_core::{
    crosscheck, min_cuts_over_partitions, optimize_min_beta, solve_decision, CutSet,
    PauliObservable, SolverOptions, VertexKind,
};

fn gd(c: &mut Criterion) {
    let insts = reduction_instances();
    c.bench_function("gd decision, reduction families", |b| {
        b.iter(|| {
            for i in &insts {
                black_box(solve_decision(i));
            }
        })
    });
    let dags = small_dags();
    c.bench_function("gd min beta, 50 small dags", |b| {
        b.iter(|| {
            for g in &dags {
                black_box(optimize_min_beta(g, 3, 3, 3).unwrap());
            }
        })
    });
}

fn constraints(c: &mut Criterion) {
    let dags = small_dags();
    let opts = SolverOptions {
        p_max: 3,
        beta_cap: Some(3),
        ..SolverOptions::default()
    };
    c.bench_function("partition model, 50 small dags", |b| {
        b.iter(|| {
            for g in &dags {
                black_box(min_cuts_over_partitions(g, 3, &opts).ok());
            }
        })
    });
}

fn reconstruction(c: &mut Criterion) {
    let circ = ghz(6);
    let g = CircuitDag::build(&circ).graph;
    let cuts: CutSet = g
        .edges()
        .iter()
        .filter(|e| g.kind(e.src) == VertexKind::Gate && g.kind(e.dst) == VertexKind::Gate)
        .map(|e| e.id)
        .take(3)
        .collect();
    let obs: PauliObservable = "XXXXXX".parse().unwrap();
    c.bench_function("reconstruct ghz-6, 3 cuts", |b| {
        b.iter(|| black_box(crosscheck(&circ, &cuts, &obs).unwrap()))
    });
}

criterion_group!(benches, gd, constraints, reconstruction);
criterion_main!(benches);
