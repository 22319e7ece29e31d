//! Experiment runners: phase transitions, noise sweeps, convergence traces,
//! the adaptive `s₀` sweep, timing and matrix analysis.
//!
//! An [`ExperimentSpec`] (usually read from JSON) describes the problem
//! template, the algorithms, the sweep grid and the number of trials. Every
//! runner returns an [`ExperimentOutput`] in memory; [`write_outputs`] turns
//! it into CSV files.

mod output;
mod run;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use output::{aggregate, write_outputs, AggregateRow, TimingRow, TraceMeanRow, TraceRow};
pub use run::{
    analyze, run_adaptive_s0_sweep, run_convergence_trace, run_experiment, run_noise_sweep, run_phase_transition,
    run_timing, AnalyzeReport,
};

use crate::error::{NstError, Result};
use crate::probgen::{Ensemble, NoiseSpec, ProblemSpec};
use crate::solvers::{Algorithm, NstVariant, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PhaseTransition,
    Timing,
    NoiseSweep,
    ConvergenceTrace,
    AdaptiveS0Sweep,
}

/// The adaptive wrapper as a benchmark entry. `s₀ = max(1, round(κs))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSpec {
    pub variant: NstVariant,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_s_step")]
    pub s_step: usize,
    /// Defaults to `n/2`.
    #[serde(default)]
    pub s_max: Option<usize>,
}

fn default_kappa() -> f64 {
    1.0
}

fn default_s_step() -> usize {
    1
}

impl AdaptiveSpec {
    pub fn new(variant: NstVariant, kappa: f64) -> Self {
        Self {
            variant,
            kappa,
            s_step: 1,
            s_max: None,
        }
    }
}

/// One entry of the `algorithms` list: either a plain identifier such as
/// `"nst_ht_fb"` or `{"adaptive": {"variant": "nst_ht", "kappa": 0.3}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmSpec {
    Basic(Algorithm),
    Adaptive { adaptive: AdaptiveSpec },
}

impl AlgorithmSpec {
    /// Identifier written to the CSV files. Adaptive entries carry their `κ`
    /// so that aggregates can be rebuilt from the per-trial file alone.
    pub fn label(&self, kappa: Option<f64>) -> String {
        match self {
            AlgorithmSpec::Basic(a) => a.name().to_string(),
            AlgorithmSpec::Adaptive { adaptive } => {
                format!("adaptive_{}:kappa={}", adaptive.variant.name(), kappa.unwrap_or(adaptive.kappa))
            }
        }
    }
}

impl From<Algorithm> for AlgorithmSpec {
    fn from(a: Algorithm) -> Self {
        AlgorithmSpec::Basic(a)
    }
}

/// Grid of swept parameters; unused dimensions stay empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Sweep {
    #[serde(default)]
    pub s: Vec<usize>,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub kappa: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Template; `s` and the noise level are overridden by the sweep. Its
    /// `seed` is the master seed of the experiment.
    pub problem: ProblemSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    pub sweep: Sweep,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_success_tol")]
    pub success_tol: f64,
    /// Directory for the CSV files.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Tolerances and iteration cap shared by every solver; `sparsity` is
    /// set per grid point.
    #[serde(default)]
    pub solver: SolverConfig,
    /// Track `max_k ‖Axᵏ − b‖/‖b‖` in every NST run.
    #[serde(default)]
    pub check_feasibility: bool,
    /// Worker threads; 0 lets rayon decide.
    #[serde(default)]
    pub threads: usize,
}

fn default_trials() -> usize {
    100
}

fn default_success_tol() -> f64 {
    1e-4
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, problem: ProblemSpec, algorithms: Vec<AlgorithmSpec>, sweep: Sweep) -> Self {
        Self {
            kind,
            problem,
            algorithms,
            sweep,
            trials: default_trials(),
            success_tol: default_success_tol(),
            output_path: None,
            solver: SolverConfig::default(),
            check_feasibility: false,
            threads: 0,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.problem.seed = seed;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_feasibility_check(mut self, on: bool) -> Self {
        self.check_feasibility = on;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| NstError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Desk-scale default for each experiment on 128 × 256 Gaussian matrices.
    pub fn preset(kind: ExperimentKind) -> Self {
        use Algorithm::*;
        let problem = ProblemSpec::new(128, 256, 20, Ensemble::Gaussian).with_seed(2024);
        let adaptive = |k: f64| AlgorithmSpec::Adaptive {
            adaptive: AdaptiveSpec::new(NstVariant::Ht, k),
        };
        match kind {
            ExperimentKind::PhaseTransition => Self::new(
                kind,
                problem,
                vec![NstHt.into(), NstHtFb.into(), adaptive(0.3), Iht.into(), Omp.into(), Sp.into(), Htp.into()],
                Sweep {
                    s: (1..=7).map(|i| 10 * i).collect(),
                    ..Sweep::default()
                },
            ),
            ExperimentKind::NoiseSweep => Self::new(
                kind,
                problem.with_noise(NoiseSpec::signal(0.0)),
                vec![NstHt.into(), NstHtFb.into(), Iht.into(), Omp.into()],
                Sweep {
                    s: vec![20],
                    eps: (0..=10).map(|i| 0.02 * i as f64).collect(),
                    ..Sweep::default()
                },
            ),
            ExperimentKind::ConvergenceTrace => Self::new(
                kind,
                problem,
                vec![NstHt.into(), NstHtFb.into(), NstHtSubfb.into(), NstStretchedHt.into(), Iht.into()],
                Sweep {
                    s: vec![30],
                    ..Sweep::default()
                },
            ),
            ExperimentKind::AdaptiveS0Sweep => Self::new(
                kind,
                problem,
                vec![adaptive(1.0)],
                Sweep {
                    s: vec![40, 45, 50, 55, 60],
                    kappa: vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
                    ..Sweep::default()
                },
            ),
            ExperimentKind::Timing => Self::new(
                kind,
                problem,
                vec![NstHt.into(), NstHtFb.into(), Omp.into(), Sp.into(), Htp.into()],
                Sweep {
                    s: vec![10, 20, 30, 38],
                    ..Sweep::default()
                },
            )
            .with_trials(20),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NstError::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.success_tol > 0.0) {
            return bad("success_tol must be positive".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms listed".into());
        }
        if self.sweep.s.is_empty() {
            return bad("sweep.s must list at least one sparsity".into());
        }
        for &s in &self.sweep.s {
            ProblemSpec {
                s,
                ..self.problem.clone()
            }
            .validate()?;
        }
        self.solver.validate()?;
        match self.kind {
            ExperimentKind::NoiseSweep => {
                if self.sweep.eps.is_empty() {
                    return bad("a noise sweep needs sweep.eps".into());
                }
                if self.problem.noise.kind == crate::probgen::NoiseKind::None {
                    return bad("a noise sweep needs a noise model in problem.noise".into());
                }
                if self.sweep.eps.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
                    return bad("noise levels must be finite and non-negative".into());
                }
            }
            ExperimentKind::AdaptiveS0Sweep => {
                if self.sweep.kappa.is_empty() {
                    return bad("an adaptive sweep needs sweep.kappa".into());
                }
                if self.algorithms.iter().any(|a| matches!(a, AlgorithmSpec::Basic(_))) {
                    return bad("an adaptive sweep takes only adaptive algorithms".into());
                }
            }
            _ => {}
        }
        for k in self.sweep.kappa.iter().chain(self.algorithms.iter().filter_map(|a| match a {
            AlgorithmSpec::Adaptive { adaptive } => Some(&adaptive.kappa),
            _ => None,
        })) {
            if !(*k > 0.0) || !k.is_finite() {
                return bad(format!("kappa must be positive, got {k}"));
            }
        }
        Ok(())
    }
}

/// One solver run on one generated problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: String,
    pub s: usize,
    pub eps: Option<f64>,
    pub kappa: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    /// `‖u − x♯‖₂/‖x♯‖₂`
    pub rel_error: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub termination: String,
    pub success: bool,
    /// Largest relative feasibility residual seen, when tracking was on.
    #[serde(skip)]
    pub max_feasibility_residual: Option<f64>,
    /// `‖x⁰ − x♯‖/‖x♯‖` followed by `‖uᵏ − x♯‖/‖x♯‖` per iteration, for
    /// convergence traces.
    #[serde(skip)]
    pub trace: Option<Vec<f64>>,
    /// Sort key: (problem grid index, κ index, algorithm index).
    #[serde(skip)]
    pub(crate) key: (usize, usize, usize),
}

/// Everything a runner produces.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
    pub traces: Vec<TraceRow>,
    pub trace_means: Vec<TraceMeanRow>,
    pub timing: Vec<TimingRow>,
}

impl ExperimentOutput {
    /// Largest feasibility residual over all tracked runs.
    pub fn max_feasibility_residual(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.max_feasibility_residual)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Aggregate rows for one algorithm label, in grid order.
    pub fn aggregates_for(&self, label: &str) -> Vec<&AggregateRow> {
        self.aggregates.iter().filter(|r| r.algorithm == label).collect()
    }
}
