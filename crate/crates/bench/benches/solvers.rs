use criterion::{black_box, criterion_group, criterion_main, Criterion};
use lechat_bench::{grid_scenario, instance};
use lechat_core::harness::{evaluate, run_suite};
use lechat_core::lechatelier::theorem2_select;
use lechat_core::properties::{check_minimally_monotone, check_monotone};
use lechat_core::static_solver::theorem1_select;
use lechat_core::{solve_dynamic, CheckOptions, CostTable, SolveOptions};

fn static_solvers(c: &mut Criterion) {
    let inst = instance("thm2").unwrap();
    let opts = SolveOptions::default();
    c.bench_function("join_selection", |b| {
        b.iter(|| theorem1_select(black_box(&inst.problem), &opts).unwrap())
    });
    c.bench_function("lechatelier_triple", |b| {
        b.iter(|| theorem2_select(black_box(&inst.problem), None, &opts).unwrap())
    });
}

fn property_checks(c: &mut Criterion) {
    let inst = instance("thm1").unwrap();
    let table = CostTable::new(&inst.problem.cost, inst.problem.objective.lattice()).unwrap();
    let exact = CheckOptions::exact();
    c.bench_function("monotone_check", |b| {
        b.iter(|| check_monotone(black_box(&table), &exact))
    });
    c.bench_function("minimally_monotone_check", |b| {
        b.iter(|| check_minimally_monotone(black_box(&table), &exact))
    });
}

fn dynamic(c: &mut Criterion) {
    let mut g = c.benchmark_group("value_iteration");
    for k in [5, 10, 15] {
        let s = grid_scenario(k, 0.9).unwrap();
        g.bench_function(format!("grid_{k}x{k}"), |b| {
            b.iter(|| solve_dynamic(black_box(&s)).unwrap())
        });
    }
    g.finish();
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    let inst = instance("thm4").unwrap();
    g.bench_function("thm4_single_instance", |b| {
        b.iter(|| evaluate(black_box(&inst), true).unwrap())
    });
    g.bench_function("thm1_suite_50", |b| {
        b.iter(|| run_suite("thm1", 50, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, static_solvers, property_checks, dynamic, suites);
criterion_main!(benches);
