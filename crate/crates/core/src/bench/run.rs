use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{aggregate, median, TimingRow, TraceMeanRow, TraceRow};
use super::{AlgorithmSpec, ExperimentKind, ExperimentOutput, ExperimentSpec, TrialRecord};
use crate::analysis::{certificate, rip_report, ConvergenceCertificate, RipMethod, RipReport};
use crate::error::{NstError, Result};
use crate::linalg::{dist2, norm2, DenseMatrix, MeasurementOperator};
use crate::probgen::{derive_trial_seed, generate, GeneratedProblem, ProblemSpec};
use crate::solvers::{initial_iterate, solve_adaptive, AdaptiveConfig, NstVariant, RecoveryResult, SolverConfig};

// One algorithm as run at a grid point, with its position in the output order.
struct AlgRun<'a> {
    spec: &'a AlgorithmSpec,
    label: String,
    kappa: Option<f64>,
    kappa_idx: usize,
    alg_idx: usize,
}

struct GridPoint {
    s: usize,
    eps: Option<f64>,
}

fn grid(spec: &ExperimentSpec) -> Vec<GridPoint> {
    let eps: Vec<Option<f64>> = if spec.kind == ExperimentKind::NoiseSweep {
        spec.sweep.eps.iter().map(|&e| Some(e)).collect()
    } else {
        vec![None]
    };
    spec.sweep
        .s
        .iter()
        .flat_map(|&s| eps.iter().map(move |&eps| GridPoint { s, eps }))
        .collect()
}

fn alg_runs(spec: &ExperimentSpec) -> Vec<AlgRun<'_>> {
    let mut out = Vec::new();
    if spec.kind == ExperimentKind::AdaptiveS0Sweep {
        for (ki, &k) in spec.sweep.kappa.iter().enumerate() {
            for (ai, a) in spec.algorithms.iter().enumerate() {
                out.push(AlgRun {
                    spec: a,
                    label: a.label(Some(k)),
                    kappa: Some(k),
                    kappa_idx: ki,
                    alg_idx: ai,
                });
            }
        }
    } else {
        for (ai, a) in spec.algorithms.iter().enumerate() {
            let kappa = match a {
                AlgorithmSpec::Adaptive { adaptive } => Some(adaptive.kappa),
                AlgorithmSpec::Basic(_) => None,
            };
            out.push(AlgRun {
                spec: a,
                label: a.label(kappa),
                kappa,
                kappa_idx: 0,
                alg_idx: ai,
            });
        }
    }
    out
}

fn problem_spec(spec: &ExperimentSpec, point: &GridPoint, seed: u64) -> ProblemSpec {
    let mut p = ProblemSpec {
        s: point.s,
        seed,
        ..spec.problem.clone()
    };
    if let Some(eps) = point.eps {
        p.noise.eps = eps;
    }
    p
}

fn trial_seed(master: u64, grid_index: usize, trial: usize) -> u64 {
    derive_trial_seed(derive_trial_seed(master, grid_index as u64), trial as u64)
}

fn solve(
    run: &AlgRun<'_>,
    problem: &GeneratedProblem,
    s: usize,
    spec: &ExperimentSpec,
    trace: bool,
) -> Result<RecoveryResult> {
    let nst = match run.spec {
        AlgorithmSpec::Basic(a) => a.is_nst(),
        AlgorithmSpec::Adaptive { .. } => true,
    };
    let cfg = SolverConfig {
        sparsity: s,
        trace,
        check_feasibility: nst && (spec.check_feasibility || spec.solver.check_feasibility),
        ..spec.solver.clone()
    };
    match run.spec {
        AlgorithmSpec::Basic(a) => a.solve(&problem.op, &problem.b, &cfg, None),
        AlgorithmSpec::Adaptive { adaptive } => {
            let kappa = run.kappa.unwrap_or(adaptive.kappa);
            let s0 = ((kappa * s as f64).round() as usize).max(1);
            let limit = match adaptive.variant {
                NstVariant::HtFb => problem.op.rows(),
                _ => problem.op.cols(),
            };
            let cap = limit.saturating_sub(adaptive.s_step);
            let s_max = adaptive.s_max.unwrap_or(problem.op.rows() / 2).max(s0).min(cap);
            let acfg = AdaptiveConfig::new(
                adaptive.variant,
                s0,
                adaptive.s_step,
                s_max,
                SolverConfig { sparsity: s0, ..cfg },
            );
            solve_adaptive(&problem.op, &problem.b, &acfg)
        }
    }
}

fn trace_errors(problem: &GeneratedProblem, res: &RecoveryResult) -> Option<Vec<f64>> {
    let entries = res.trace.as_ref()?;
    let nx = norm2(&problem.x_true);
    let x0 = initial_iterate(&problem.op, &problem.b).ok()?;
    let mut errs = vec![dist2(&x0, &problem.x_true) / nx];
    errs.extend(entries.iter().map(|e| dist2(&e.dense(), &problem.x_true) / nx));
    Some(errs)
}

#[allow(clippy::too_many_arguments)]
fn record(
    run: &AlgRun<'_>,
    spec: &ExperimentSpec,
    grid_index: usize,
    point: &GridPoint,
    trial: usize,
    seed: u64,
    problem: Option<&GeneratedProblem>,
    outcome: Result<RecoveryResult>,
    wall_time_s: f64,
) -> TrialRecord {
    let key = (grid_index, run.kappa_idx, run.alg_idx);
    let base = TrialRecord {
        algorithm: run.label.clone(),
        s: point.s,
        eps: point.eps,
        kappa: run.kappa,
        trial,
        seed,
        rel_error: 1.0,
        iterations: 0,
        wall_time_s,
        termination: String::new(),
        success: false,
        max_feasibility_residual: None,
        trace: None,
        key,
    };
    match (problem, outcome) {
        (Some(p), Ok(res)) => {
            let rel_error = dist2(&res.u, &p.x_true) / norm2(&p.x_true);
            TrialRecord {
                rel_error,
                iterations: res.iterations,
                termination: res.termination.label(),
                success: rel_error <= spec.success_tol,
                max_feasibility_residual: res.max_feasibility_residual,
                trace: trace_errors(p, &res),
                ..base
            }
        }
        (_, Err(e)) => TrialRecord {
            termination: format!("error: {e}"),
            ..base
        },
        (None, Ok(_)) => unreachable!("no solver runs without a problem"),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| NstError::InvalidConfig(e.to_string()))
}

// Runs every (grid point, trial) job, all algorithms on the same problem.
fn run_trials(spec: &ExperimentSpec, trace: bool) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let points = grid(spec);
    let runs = alg_runs(spec);
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|g| (0..spec.trials).map(move |t| (g, t)))
        .collect();
    let master = spec.problem.seed;
    let mut records: Vec<TrialRecord> = pool(spec.threads)?.install(|| {
        jobs.par_iter()
            .flat_map_iter(|&(g, t)| {
                let point = &points[g];
                let seed = trial_seed(master, g, t);
                let problem = generate(&problem_spec(spec, point, seed));
                runs.iter()
                    .map(|run| match &problem {
                        Ok(p) => {
                            let start = Instant::now();
                            let res = solve(run, p, point.s, spec, trace);
                            let dt = start.elapsed().as_secs_f64();
                            record(run, spec, g, point, t, seed, Some(p), res, dt)
                        }
                        Err(e) => record(run, spec, g, point, t, seed, None, Err(e.clone()), 0.0),
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    });
    records.sort_by_key(|r| (r.key, r.trial));
    Ok(records)
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return Err(NstError::InvalidConfig(format!(
            "expected a {kind:?} experiment, got {:?}",
            spec.kind
        )));
    }
    Ok(())
}

fn finish(spec: &ExperimentSpec, records: Vec<TrialRecord>) -> ExperimentOutput {
    let aggregates = aggregate(&records, spec.problem.n, spec.kind == ExperimentKind::Timing);
    ExperimentOutput {
        records,
        aggregates,
        ..ExperimentOutput::default()
    }
}

/// Success frequency against `s` for every algorithm.
pub fn run_phase_transition(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::PhaseTransition)?;
    Ok(finish(spec, run_trials(spec, false)?))
}

/// Mean relative error against the noise level.
pub fn run_noise_sweep(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::NoiseSweep)?;
    Ok(finish(spec, run_trials(spec, false)?))
}

/// Success frequency over the `(s, κ)` grid for adaptive solvers started at
/// `s₀ = κs`.
pub fn run_adaptive_s0_sweep(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::AdaptiveS0Sweep)?;
    Ok(finish(spec, run_trials(spec, false)?))
}

/// Per-iteration relative errors. Row 0 of each trace is `‖x⁰ − x♯‖/‖x♯‖`
/// for the least-squares start `x⁰`; row `k + 1` is `‖uᵏ − x♯‖/‖x♯‖`.
/// Greedy baselines have no trace.
pub fn run_convergence_trace(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::ConvergenceTrace)?;
    let records = run_trials(spec, true)?;
    let mut traces = Vec::new();
    let mut trace_means = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let head = &records[start];
        let end = start + records[start..].iter().take_while(|r| r.key == head.key).count();
        let group: Vec<&Vec<f64>> = records[start..end].iter().filter_map(|r| r.trace.as_ref()).collect();
        for r in &records[start..end] {
            if let Some(t) = &r.trace {
                traces.extend(t.iter().enumerate().map(|(iter, &e)| TraceRow {
                    algorithm: r.algorithm.clone(),
                    s: r.s,
                    trial: r.trial,
                    iter,
                    rel_error: e,
                }));
            }
        }
        let len = group.iter().map(|t| t.len()).max().unwrap_or(0);
        for iter in 0..len {
            let sum: f64 = group.iter().map(|t| t.get(iter).or(t.last()).copied().unwrap_or(0.0)).sum();
            trace_means.push(TraceMeanRow {
                algorithm: head.algorithm.clone(),
                s: head.s,
                iter,
                mean_rel_error: sum / group.len() as f64,
            });
        }
        start = end;
    }
    let mut out = finish(spec, records);
    out.traces = traces;
    out.trace_means = trace_means;
    Ok(out)
}

/// Wall-clock comparison. Trials run one at a time on the calling thread;
/// a warm-up pass over every algorithm is discarded, and operator
/// construction is timed apart from the solves.
pub fn run_timing(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::Timing)?;
    spec.validate()?;
    let points = grid(spec);
    let runs = alg_runs(spec);
    let master = spec.problem.seed;

    if let Ok(p) = generate(&problem_spec(spec, &points[0], trial_seed(master, 0, 0))) {
        for run in &runs {
            let _ = solve(run, &p, points[0].s, spec, false);
        }
    }

    let mut records = Vec::new();
    let mut timing = Vec::new();
    for (g, point) in points.iter().enumerate() {
        let mut builds = Vec::with_capacity(spec.trials);
        let mut solves: Vec<Vec<f64>> = vec![Vec::with_capacity(spec.trials); runs.len()];
        for t in 0..spec.trials {
            let seed = trial_seed(master, g, t);
            let problem = generate(&problem_spec(spec, point, seed));
            let p = match problem {
                Ok(p) => p,
                Err(e) => {
                    for run in &runs {
                        records.push(record(run, spec, g, point, t, seed, None, Err(e.clone()), 0.0));
                    }
                    continue;
                }
            };
            let start = Instant::now();
            let rebuilt = MeasurementOperator::new(p.op.matrix().clone());
            builds.push(start.elapsed().as_secs_f64());
            drop(rebuilt);
            for (i, run) in runs.iter().enumerate() {
                let start = Instant::now();
                let res = solve(run, &p, point.s, spec, false);
                let dt = start.elapsed().as_secs_f64();
                solves[i].push(dt);
                records.push(record(run, spec, g, point, t, seed, Some(&p), res, dt));
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        for (i, run) in runs.iter().enumerate() {
            timing.push(TimingRow {
                algorithm: run.label.clone(),
                s: point.s,
                s_over_n: point.s as f64 / spec.problem.n as f64,
                trials: solves[i].len(),
                mean_solve_s: mean(&solves[i]),
                median_solve_s: median(&solves[i]),
                mean_build_s: mean(&builds),
                median_build_s: median(&builds),
            });
        }
    }
    records.sort_by_key(|r| (r.key, r.trial));
    let mut out = finish(spec, records);
    out.timing = timing;
    Ok(out)
}

/// Dispatches on `spec.kind`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    match spec.kind {
        ExperimentKind::PhaseTransition => run_phase_transition(spec),
        ExperimentKind::NoiseSweep => run_noise_sweep(spec),
        ExperimentKind::ConvergenceTrace => run_convergence_trace(spec),
        ExperimentKind::AdaptiveS0Sweep => run_adaptive_s0_sweep(spec),
        ExperimentKind::Timing => run_timing(spec),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub rip: RipReport,
    /// Present when `3s ≤ N`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<ConvergenceCertificate>,
}

/// `δ_s`, `γ_s` and, when `3s ≤ N`, the convergence certificate of a matrix.
pub fn analyze(matrix: DenseMatrix, s: usize, method: RipMethod) -> Result<AnalyzeReport> {
    let op = MeasurementOperator::new(matrix)?;
    let rip = rip_report(&op, s, method)?;
    let certificate = if 3 * s <= op.cols() {
        Some(certificate(&op, s, method)?)
    } else {
        None
    };
    Ok(AnalyzeReport { rip, certificate })
}
