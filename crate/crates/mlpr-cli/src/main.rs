//! `mlpr`: multilinear PageRank solvers with restarted extrapolation.
//!
//! Subcommands: `solve` (one problem, residual trace to CSV), `generate`
//! (random stochastic tensor files), `bench` (seeded suites with
//! per-method comparison tables). The environment variable `MLPR_THREADS`
//! caps the parallelism of the tensor apply kernel and of bench suites;
//! unset or 1 means fully deterministic sequential execution.

mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mlpr_core::extrapolation::YStrategy;
use mlpr_core::tensor::ApplyMode;

#[derive(Parser)]
#[command(
    name = "mlpr",
    version,
    about = "Multilinear PageRank: shifted fixed-point and inner-outer solvers,\naccelerated by restarted simplified topological epsilon-algorithm extrapolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem; writes the per-step residual trace as CSV.
    Solve(SolveArgs),
    /// Generate a block-random stochastic tensor file.
    Generate(GenerateArgs),
    /// Run a seeded suite of problems and tabulate per-method results.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, ValueEnum)]
pub enum Method {
    /// Shifted fixed-point method.
    Sfpm,
    /// Inner-outer method.
    Io,
    /// SFPM wrapped in restarted extrapolation.
    SfpmStea,
    /// Inner-outer wrapped in restarted extrapolation.
    IoStea,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sfpm => "sfpm",
            Method::Io => "io",
            Method::SfpmStea => "sfpm-stea",
            Method::IoStea => "io-stea",
        }
    }

    pub fn extrapolated(self) -> bool {
        matches!(self, Method::SfpmStea | Method::IoStea)
    }

    pub fn extrapolated_counterpart(self) -> Option<Method> {
        match self {
            Method::Sfpm => Some(Method::SfpmStea),
            Method::Io => Some(Method::IoStea),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
pub enum YStrategyArg {
    /// One seeded random simplex vector, kept across cycles.
    FixedRandom,
    /// The previous extrapolated vector (seeded random initially).
    #[default]
    LastExtrapolated,
    /// Per-cycle construction guaranteeing stochastic extrapolants
    /// (needs 2k <= n; costs a QR factorization per cycle).
    StochasticityEnforcing,
}

impl From<YStrategyArg> for YStrategy {
    fn from(a: YStrategyArg) -> Self {
        match a {
            YStrategyArg::FixedRandom => YStrategy::FixedRandom,
            YStrategyArg::LastExtrapolated => YStrategy::LastExtrapolated,
            YStrategyArg::StochasticityEnforcing => YStrategy::StochasticityEnforcing,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
pub enum StartArg {
    /// The teleportation vector (the default convention).
    #[default]
    V,
    /// The uniform distribution.
    Uniform,
    /// A seeded random simplex point.
    Random,
}

#[derive(Args)]
pub struct SourceArgs {
    /// Tensor source: `saburov` (the embedded 3x3x3 tensor with three
    /// stochastic fixed points) or a path to an mlpr-tensor v1 file.
    #[arg(long)]
    pub tensor: Option<String>,
    /// MatrixMarket graph file; builds the order-3 triangle/adjacency
    /// blend with weight --beta.
    #[arg(long, conflicts_with = "tensor")]
    pub graph: Option<PathBuf>,
    /// Blend weight for --graph (1 = pure triangle part).
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Generate a random tensor of this dimension (see --random-m, --seed).
    #[arg(long, conflicts_with_all = ["tensor", "graph"])]
    pub random_n: Option<usize>,
    /// Order of the generated tensor.
    #[arg(long, default_value_t = 3)]
    pub random_m: usize,
}

#[derive(Args)]
pub struct MethodArgs {
    #[arg(long, value_enum, default_value_t = Method::Sfpm)]
    pub method: Method,
    /// Damping factor in [0, 1).
    #[arg(long, default_value_t = 0.99)]
    pub alpha: f64,
    /// SFPM shift. Convergence is guaranteed for alpha < 1/(m-1); beyond
    /// that a shift of at least (m-1)/2 is the recommended setting.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Residual threshold.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Hard cap on tensor-apply evaluations.
    #[arg(long)]
    pub max_evals: Option<u64>,
    /// Extrapolation window size 2k (even, at least 2). Defaults to 10;
    /// for --graph problems the default follows the blend weight preset
    /// (2k = 30 for beta <= 0.1, 18 for beta <= 0.3, 8 above).
    #[arg(long = "k2")]
    pub k2: Option<usize>,
    /// Extrapolation restart cycles.
    #[arg(long, default_value_t = 4)]
    pub cycles: usize,
    #[arg(long, value_enum, default_value_t)]
    pub y_strategy: YStrategyArg,
    /// Seed for generators and for the initial dual vector.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting vector convention.
    #[arg(long, value_enum, default_value_t)]
    pub start: StartArg,
}

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Trace CSV path; the final vector is written next to it with the
    /// extension `.vec`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Model pool: `mixed` draws per block from all models, a single
    /// model name restricts the pool to it.
    #[arg(long, default_value = "mixed")]
    pub kind: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path (mlpr-tensor v1).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Number of seeded problem instances.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Comma-separated subset of sfpm,io,sfpm-stea,io-stea.
    #[arg(long, default_value = "sfpm,sfpm-stea")]
    pub methods: String,
    /// Give each plain method the evaluation budget its extrapolated
    /// counterpart consumed on the same instance.
    #[arg(long, default_value_t = false)]
    pub equal_budget: bool,
    /// Per-run CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub method: MethodArgs,
}

/// MLPR_THREADS: 0/1 (or unset) means deterministic sequential apply;
/// larger values enable the chunked parallel reduction on that many
/// threads.
fn configure_threads() -> (ApplyMode, usize) {
    let threads = std::env::var("MLPR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(1);
    if threads <= 1 {
        return (ApplyMode::Sequential, 1);
    }
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
        (ApplyMode::Parallel, threads)
    }
    #[cfg(not(feature = "parallel"))]
    {
        eprintln!("warning: built without the `parallel` feature; MLPR_THREADS ignored");
        (ApplyMode::Sequential, 1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, threads) = configure_threads();
    let outcome = match cli.command {
        Command::Solve(args) => run::cmd_solve(args, mode),
        Command::Generate(args) => run::cmd_generate(args),
        Command::Bench(args) => run::cmd_bench(args, mode, threads),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
