//! Problem loading and command execution.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mlpr_core::extrapolation::{restarted_solve, BasicMethod, RestartConfig};
use mlpr_core::generators::{
    build_real_world_tensor, default_model_pool, random_stochastic_tensor, GraphModel, RealWorldMix,
};
use mlpr_core::matrix_market;
use mlpr_core::solvers::{inner_outer_solve, sfpm_solve, IterationTrace};
use mlpr_core::tensor::{format, saburov, ApplyMode, StochasticTensor};
use mlpr_core::vector::DistributionVector;
use mlpr_core::{PageRankProblem, SolverConfig};

use crate::report;
use crate::{BenchArgs, GenerateArgs, Method, MethodArgs, SolveArgs, SourceArgs, StartArg};

#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

pub fn err(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

fn load_tensor(source: &SourceArgs, seed: u64) -> Result<StochasticTensor, CliError> {
    if let Some(name) = &source.tensor {
        if name == "saburov" {
            return Ok(saburov());
        }
        return format::read_tensor_file(Path::new(name)).map_err(|e| err(format!("{name}: {e}")));
    }
    if let Some(path) = &source.graph {
        let graph = matrix_market::read_graph_file(path)
            .map_err(|e| err(format!("{}: {e}", path.display())))?;
        let mix = RealWorldMix::uniform(graph.n(), source.beta).map_err(|e| err(e.to_string()))?;
        return build_real_world_tensor(&graph, &mix).map_err(|e| err(e.to_string()));
    }
    if let Some(n) = source.random_n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return random_stochastic_tensor(n, source.random_m, &default_model_pool(), &mut rng)
            .map_err(|e| err(e.to_string()));
    }
    Err(err(
        "no problem source: pass --tensor, --graph, or --random-n",
    ))
}

fn starting_vector(problem: &PageRankProblem, start: StartArg, seed: u64) -> DistributionVector {
    match start {
        StartArg::V => problem.teleport().clone(),
        StartArg::Uniform => DistributionVector::uniform(problem.dim()),
        StartArg::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5f5f_5f5f);
            DistributionVector::random_simplex(problem.dim(), &mut rng)
        }
    }
}

fn solver_config(args: &MethodArgs, max_evals: Option<u64>) -> SolverConfig {
    SolverConfig {
        gamma: args.gamma,
        tol: args.tol,
        max_iters: 10_000_000,
        inner_tol: None,
        inner_max_iters: None,
        max_map_evals: max_evals.or(args.max_evals),
    }
}

/// Window preset for graph-blend problems, keyed off the blend weight:
/// the slower-mixing the triangle part (small beta), the wider the
/// window pays off.
pub fn graph_window_preset(beta: f64) -> usize {
    if beta <= 0.1 {
        30
    } else if beta <= 0.3 {
        18
    } else {
        8
    }
}

fn window_size(args: &MethodArgs, preset: Option<usize>) -> Result<usize, CliError> {
    let k2 = args.k2.or(preset).unwrap_or(10);
    if k2 < 2 || !k2.is_multiple_of(2) {
        return Err(err(format!(
            "--k2 must be an even window size of at least 2 (got {k2})"
        )));
    }
    Ok(k2)
}

fn restart_config(args: &MethodArgs, preset: Option<usize>) -> Result<RestartConfig, CliError> {
    Ok(RestartConfig {
        half_width: window_size(args, preset)? / 2,
        cycles: args.cycles.max(1),
        y_strategy: args.y_strategy.into(),
        y_seed: args.seed,
        ..RestartConfig::default()
    })
}

pub fn run_method(
    problem: &PageRankProblem,
    method: Method,
    args: &MethodArgs,
    max_evals: Option<u64>,
    window_preset: Option<usize>,
) -> Result<IterationTrace, CliError> {
    let scfg = solver_config(args, max_evals);
    let s0 = starting_vector(problem, args.start, args.seed);
    let outcome = match method {
        Method::Sfpm => sfpm_solve(problem, &scfg, &s0),
        Method::Io => inner_outer_solve(problem, &scfg, &s0),
        Method::SfpmStea => restarted_solve(
            problem,
            BasicMethod::Sfpm,
            &scfg,
            &restart_config(args, window_preset)?,
            &s0,
        ),
        Method::IoStea => restarted_solve(
            problem,
            BasicMethod::InnerOuter,
            &scfg,
            &restart_config(args, window_preset)?,
            &s0,
        ),
    };
    outcome.map_err(|e| err(e.to_string()))
}

pub fn cmd_solve(args: SolveArgs, mode: ApplyMode) -> Result<ExitCode, CliError> {
    let tensor = load_tensor(&args.source, args.method.seed)?.with_apply_mode(mode);
    let (n, m, nnz) = (tensor.dim(), tensor.order(), tensor.nnz());
    let problem = PageRankProblem::with_uniform_teleport(tensor, args.method.alpha)
        .map_err(|e| err(e.to_string()))?;
    let preset = args
        .source
        .graph
        .is_some()
        .then(|| graph_window_preset(args.source.beta));
    let trace = run_method(&problem, args.method.method, &args.method, None, preset)?;

    println!(
        "method={} n={n} m={m} nnz={nnz} alpha={} gamma={}",
        args.method.method.name(),
        args.method.alpha,
        args.method.gamma
    );
    let iterations = trace.steps.last().map(|s| s.step).unwrap_or(0);
    println!(
        "solved={} residual={:e} iterations={iterations} map_evals={} seconds={:.3}",
        trace.converged(),
        trace.final_residual,
        trace.map_evals,
        trace.wall_seconds
    );
    if trace.stochasticity_warnings > 0 {
        eprintln!(
            "warning: {} iterate(s) drifted from stochasticity beyond 1e-9",
            trace.stochasticity_warnings
        );
    }
    if let Some(stats) = &trace.extrapolation {
        println!(
            "cycles={} degenerate_cycles={} clipped_restarts={} resident_vectors={}",
            stats.cycles_completed,
            stats.degenerate_cycles,
            stats.clipped_restarts,
            stats.max_resident_vectors
        );
    }
    if let Some(out) = &args.out {
        report::write_trace_csv(out, &trace).map_err(|e| err(format!("{}: {e}", out.display())))?;
        let vec_path = out.with_extension("vec");
        report::write_final_vector(&vec_path, &trace.final_vector)
            .map_err(|e| err(format!("{}: {e}", vec_path.display())))?;
        println!(
            "trace written to {} (final vector {})",
            out.display(),
            vec_path.display()
        );
    }
    Ok(if trace.converged() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn model_pool(kind: &str) -> Result<Vec<GraphModel>, CliError> {
    Ok(match kind {
        "mixed" => default_model_pool(),
        "smallw" => vec![GraphModel::SmallWorld {
            degree: 4,
            rewiring: 0.1,
        }],
        "gilbert" => vec![GraphModel::Gilbert { p: None }],
        "erdrey" => vec![GraphModel::ErdosRenyi { p: None }],
        "pref" => vec![GraphModel::Preferential { edges_per_node: 2 }],
        "geo" => vec![GraphModel::Geometric { radius: None }],
        "rank1" => vec![GraphModel::Rank1],
        other => {
            return Err(err(format!(
                "unknown generator kind `{other}` (expected mixed|smallw|gilbert|erdrey|pref|geo|rank1)"
            )))
        }
    })
}

pub fn cmd_generate(args: GenerateArgs) -> Result<ExitCode, CliError> {
    let pool = model_pool(&args.kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let tensor = random_stochastic_tensor(args.n, args.m, &pool, &mut rng)
        .map_err(|e| err(e.to_string()))?;
    format::write_tensor_file(&tensor, &args.out)
        .map_err(|e| err(format!("{}: {e}", args.out.display())))?;
    println!(
        "generated kind={} n={} m={} nnz={} seed={} -> {}",
        args.kind,
        args.n,
        args.m,
        tensor.nnz(),
        args.seed,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub struct BenchRow {
    pub run: usize,
    pub seed: u64,
    pub method: Method,
    pub iterations: usize,
    pub map_evals: u64,
    pub wall_seconds: f64,
    pub final_residual: f64,
    /// Table criterion: final residual at or below 1e-8.
    pub solved: bool,
}

fn parse_methods(spec: &str) -> Result<Vec<Method>, CliError> {
    let mut methods = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m = match token {
            "sfpm" => Method::Sfpm,
            "io" => Method::Io,
            "sfpm-stea" => Method::SfpmStea,
            "io-stea" => Method::IoStea,
            other => return Err(err(format!("unknown method `{other}`"))),
        };
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(err("no methods selected (the --methods filter is empty)"));
    }
    Ok(methods)
}

fn bench_one(
    args: &BenchArgs,
    methods: &[Method],
    run: usize,
    mode: ApplyMode,
) -> Result<Vec<BenchRow>, CliError> {
    let seed = args.method.seed.wrapping_add(run as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensor = random_stochastic_tensor(args.n, args.m, &default_model_pool(), &mut rng)
        .map_err(|e| err(e.to_string()))?
        .with_apply_mode(mode);
    let problem = PageRankProblem::with_uniform_teleport(tensor, args.method.alpha)
        .map_err(|e| err(e.to_string()))?;
    let mut margs = MethodArgs {
        ..clone_method_args(&args.method)
    };
    margs.seed = seed;

    // Extrapolated arms first so equal-budget plain arms know their caps.
    let mut ordered: Vec<Method> = methods
        .iter()
        .copied()
        .filter(|m| m.extrapolated())
        .collect();
    ordered.extend(methods.iter().copied().filter(|m| !m.extrapolated()));

    let mut rows: Vec<BenchRow> = Vec::new();
    for method in ordered {
        let cap = if args.equal_budget && !method.extrapolated() {
            method
                .extrapolated_counterpart()
                .and_then(|c| rows.iter().find(|r| r.method == c))
                .map(|r| r.map_evals)
        } else {
            None
        };
        let trace = run_method(&problem, method, &margs, cap, None)?;
        rows.push(BenchRow {
            run,
            seed,
            method,
            iterations: trace.steps.last().map(|s| s.step).unwrap_or(0),
            map_evals: trace.map_evals,
            wall_seconds: trace.wall_seconds,
            final_residual: trace.final_residual,
            solved: trace.final_residual <= 1e-8,
        });
    }
    // restore the caller-visible order
    rows.sort_by_key(|r| methods.iter().position(|m| *m == r.method));
    Ok(rows)
}

fn clone_method_args(a: &MethodArgs) -> MethodArgs {
    MethodArgs {
        method: a.method,
        alpha: a.alpha,
        gamma: a.gamma,
        tol: a.tol,
        max_evals: a.max_evals,
        k2: a.k2,
        cycles: a.cycles,
        y_strategy: a.y_strategy,
        seed: a.seed,
        start: a.start,
    }
}

pub fn cmd_bench(args: BenchArgs, mode: ApplyMode, threads: usize) -> Result<ExitCode, CliError> {
    let methods = parse_methods(&args.methods)?;
    if args.count == 0 {
        return Err(err("--count must be at least 1"));
    }

    let run_indices: Vec<usize> = (0..args.count).collect();
    let results: Vec<Result<Vec<BenchRow>, CliError>> = {
        #[cfg(feature = "parallel")]
        {
            if threads > 1 {
                use rayon::prelude::*;
                run_indices
                    .par_iter()
                    .map(|&run| bench_one(&args, &methods, run, mode))
                    .collect()
            } else {
                run_indices
                    .iter()
                    .map(|&run| bench_one(&args, &methods, run, mode))
                    .collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = threads;
            run_indices
                .iter()
                .map(|&run| bench_one(&args, &methods, run, mode))
                .collect()
        }
    };

    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (run, res) in results.into_iter().enumerate() {
        match res {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => {
                failures += 1;
                eprintln!("run {run} failed: {e}");
            }
        }
    }
    report::print_bench_summary(&methods, &rows, failures);
    if let Some(out) = &args.out {
        report::write_bench_csv(out, &rows).map_err(|e| err(format!("{}: {e}", out.display())))?;
        println!("per-run table written to {}", out.display());
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
