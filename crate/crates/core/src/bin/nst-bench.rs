//! Command-line front end for the experiment runners.
//!
//! Exit codes: 0 success, 1 usage error, 2 analysis infeasible, 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nst::analysis::RipMethod;
use nst::bench::{self, ExperimentKind, ExperimentOutput, ExperimentSpec};
use nst::linalg::{read_matrix, read_vector, write_vector};
use nst::{Algorithm, MeasurementOperator, NstError, SolverConfig};

#[derive(Parser)]
#[command(name = "nst-bench", version, about = "Sparse recovery experiments with null-space tuning solvers")]
struct Cli {
    /// Experiment spec (JSON). Without it a built-in desk-scale preset is used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for experiments, or output file for analyze/solve.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per grid point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success frequency against sparsity.
    Phase,
    /// Mean relative error against noise level.
    Noise,
    /// Per-iteration relative error.
    Trace,
    /// Adaptive solver over a grid of s0 = kappa * s.
    Adaptive,
    /// Wall-clock comparison.
    Timing,
    /// Restricted-isometry constants and convergence certificate of a matrix.
    Analyze(AnalyzeArgs),
    /// Run one solver on a matrix and right-hand side read from files.
    Solve(SolveArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(short, long)]
    s: usize,
    /// Sample this many random supports instead of enumerating all of them.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    /// One of nst_ht, nst_ht_fb, nst_ht_subfb, nst_stretched_ht, iht, omp, sp, htp.
    #[arg(long, default_value = "nst_ht_fb")]
    algorithm: String,
    #[arg(short, long)]
    s: usize,
    #[arg(long, default_value_t = nst::solvers::DEFAULT_MAX_ITERS)]
    max_iters: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<NstError> for Failure {
    fn from(e: NstError) -> Self {
        let code = match e {
            NstError::Io(_) => 3,
            NstError::CombinatorialBlowup { .. }
            | NstError::RankDeficient { .. }
            | NstError::SingularSubmatrix { .. }
            | NstError::NotParseval { .. }
            | NstError::ConditionNotMet { .. }
            | NstError::NonConvergence { .. } => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

// Problems with input files are I/O failures, whatever the cause.
fn input<T>(r: nst::Result<T>, path: &Path) -> Result<T, Failure> {
    r.map_err(|e| Failure {
        code: 3,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_spec(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentSpec, Failure> {
    let mut spec = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: 3,
                message: format!("{}: {e}", path.display()),
            })?;
            let spec = ExperimentSpec::from_json(&text)?;
            if spec.kind != kind {
                return Err(Failure::usage(format!(
                    "{} describes a {:?} experiment",
                    path.display(),
                    spec.kind
                )));
            }
            spec
        }
        None => ExperimentSpec::preset(kind),
    };
    if let Some(seed) = cli.seed {
        spec.problem.seed = seed;
    }
    if let Some(trials) = cli.trials {
        spec.trials = trials;
    }
    if let Some(threads) = cli.threads {
        spec.threads = threads;
    }
    if let Some(out) = &cli.out {
        spec.output_path = Some(out.clone());
    }
    Ok(spec)
}

fn summary(out: &ExperimentOutput) {
    println!("algorithm\ts\teps\tkappa\tsuccess\tmean_rel_error\tmean_iters");
    for r in &out.aggregates {
        let show = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_else(|| "-".into());
        println!(
            "{}\t{}\t{}\t{}\t{:.3}\t{:.3e}\t{:.1}",
            r.algorithm,
            r.s,
            show(r.eps),
            show(r.kappa),
            r.success_freq,
            r.mean_rel_error,
            r.mean_iters
        );
    }
}

fn experiment(cli: &Cli, kind: ExperimentKind, default_dir: &str) -> Result<(), Failure> {
    let spec = load_spec(cli, kind)?;
    let dir = spec.output_path.clone().unwrap_or_else(|| PathBuf::from(default_dir));
    let out = bench::run_experiment(&spec)?;
    bench::write_outputs(&out, &dir).map_err(|e| Failure {
        code: 3,
        message: e.to_string(),
    })?;
    summary(&out);
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: 3,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<(), Failure> {
    let matrix = input(read_matrix(&args.matrix), &args.matrix)?;
    let method = match args.samples {
        Some(count) => RipMethod::RandomSample {
            count,
            seed: cli.seed.unwrap_or(0),
        },
        None => RipMethod::Exhaustive,
    };
    let report = bench::analyze(matrix, args.s, method)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_text(cli.out.as_deref(), &json)
}

fn solve(cli: &Cli, args: &SolveArgs) -> Result<(), Failure> {
    let algorithm =
        Algorithm::from_name(&args.algorithm).ok_or_else(|| Failure::usage(format!("unknown algorithm {}", args.algorithm)))?;
    let matrix = input(read_matrix(&args.matrix), &args.matrix)?;
    let b = input(read_vector(&args.rhs), &args.rhs)?;
    let op = MeasurementOperator::new(matrix)?;
    let cfg = SolverConfig::new(args.s).with_max_iters(args.max_iters);
    cfg.validate()?;
    let res = algorithm.solve(&op, &b, &cfg, None)?;
    eprintln!(
        "{}: {} after {} iterations, relative residual {:.3e}",
        algorithm,
        res.termination.label(),
        res.iterations,
        res.residual_rel
    );
    match &cli.out {
        Some(p) => write_vector(p, &res.u).map_err(|e| Failure {
            code: 3,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            for v in &res.u {
                println!("{v:.17e}");
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Phase => experiment(cli, ExperimentKind::PhaseTransition, "results/phase"),
        Command::Noise => experiment(cli, ExperimentKind::NoiseSweep, "results/noise"),
        Command::Trace => experiment(cli, ExperimentKind::ConvergenceTrace, "results/trace"),
        Command::Adaptive => experiment(cli, ExperimentKind::AdaptiveS0Sweep, "results/adaptive"),
        Command::Timing => experiment(cli, ExperimentKind::Timing, "results/timing"),
        Command::Analyze(args) => analyze(cli, args),
        Command::Solve(args) => solve(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nst-bench: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
