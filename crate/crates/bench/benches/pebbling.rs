use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pebbling_core::families::{bruhat, cycle, hypercube, petersen};
use pebbling_core::lp::{self, build_relaxation};
use pebbling_core::solver::{self, SolverOptions};
use pebbling_core::strategy::{self, GenerationMethod};
use pebbling_core::treepi;
use pebbling_core::verify::{petersen_neighbor_trees, simplex_suite};
use pebbling_core::{families::tree_from_parents, Configuration};

fn solver_benches(c: &mut Criterion) {
    let p = petersen();
    let opts = SolverOptions::default();
    c.bench_function("pi petersen", |b| b.iter(|| solver::pi_graph(black_box(&p), &opts).unwrap()));

    let c7 = cycle(7).unwrap();
    c.bench_function("pi C7 root 0", |b| b.iter(|| solver::pi_rooted(black_box(&c7), 0, &opts).unwrap()));

    let q3 = hypercube(3).unwrap();
    let stuck = Configuration(vec![0, 1, 1, 0, 1, 0, 0, 3]);
    c.bench_function("is_solvable Q3 unsolvable", |b| {
        b.iter(|| solver::is_solvable(black_box(&q3), &stuck, 0).unwrap())
    });
}

fn strategy_benches(c: &mut Criterion) {
    let p = petersen();
    let mut group = c.benchmark_group("strategies");
    group.sample_size(10);
    group.bench_function("greedy petersen", |b| {
        b.iter(|| strategy::generate_strategies(black_box(&p), 0, GenerationMethod::default()).unwrap())
    });
    let b3 = bruhat(3).unwrap();
    group.bench_function("all paths B3", |b| {
        b.iter(|| strategy::generate_strategies(black_box(&b3), 0, GenerationMethod::AllPaths { max_len: 3 }).unwrap())
    });
    group.finish();
}

fn lp_benches(c: &mut Criterion) {
    let suite = simplex_suite();
    c.bench_function("simplex suite", |b| {
        b.iter(|| suite.iter().map(|p| lp::solve_max(black_box(p)).pivot_count).sum::<usize>())
    });
    let relax = build_relaxation(&petersen(), 0, &petersen_neighbor_trees(0)).unwrap();
    c.bench_function("petersen relaxation", |b| b.iter(|| lp::solve_max(black_box(&relax.program))));
}

fn tree_benches(c: &mut Criterion) {
    let parents: Vec<Option<usize>> = std::iter::once(None).chain((1..200).map(|v| Some((v - 1) / 3))).collect();
    let t = tree_from_parents(&parents).unwrap();
    c.bench_function("pi_tree ternary 200", |b| b.iter(|| treepi::pi_tree_all(black_box(&t)).unwrap()));
}

criterion_group!(benches, solver_benches, strategy_benches, lp_benches, tree_benches);
criterion_main!(benches);
