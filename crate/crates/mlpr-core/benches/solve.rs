//! End-to-end solver comparison: plain SFPM vs its restarted
//! extrapolation at a fixed evaluation budget.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use mlpr_core::extrapolation::{restarted_solve, BasicMethod, RestartConfig};
use mlpr_core::generators::random_stochastic_tensor_seeded;
use mlpr_core::solvers::sfpm_solve;
use mlpr_core::vector::DistributionVector;
use mlpr_core::{PageRankProblem, SolverConfig};

fn bench_solvers(c: &mut Criterion) {
    let tensor = random_stochastic_tensor_seeded(50, 3, 3).expect("generator");
    let problem = PageRankProblem::with_uniform_teleport(tensor, 0.99).expect("problem");
    let s0 = DistributionVector::uniform(problem.dim());

    let rcfg = RestartConfig::new(5, 4); // 2k = 10, 4 cycles: 41 evaluations
    let budget = 1 + rcfg.cycles * rcfg.width() + rcfg.cycles;

    let mut group = c.benchmark_group("solve_fixed_budget");
    group.sample_size(20);
    group.bench_function("sfpm", |b| {
        let cfg = SolverConfig {
            gamma: 1.0,
            tol: 1e-15,
            max_iters: budget - 1,
            ..SolverConfig::default()
        };
        b.iter(|| black_box(sfpm_solve(&problem, &cfg, &s0).unwrap()))
    });
    group.bench_function("sfpm_stea2", |b| {
        let cfg = SolverConfig {
            gamma: 1.0,
            tol: 1e-15,
            ..SolverConfig::default()
        };
        b.iter(|| {
            black_box(restarted_solve(&problem, BasicMethod::Sfpm, &cfg, &rcfg, &s0).unwrap())
        })
    });
    group.finish();
}

criterion_group!(benches, bench_solvers);
criterion_main!(benches);
