//! Null-space-tuning solvers and the thresholding/greedy baselines.
//!
//! Every NST variant alternates an approximation step producing a sparse
//! `uᵏ` from the feasible iterate `xᵏ`, and a null-space step
//! `xᵏ⁺¹ = uᵏ + A*(AA*)⁻¹(b − Auᵏ)` that projects back onto `{x : Ax = b}`.
//! The variants differ only in how `uᵏ` is built:
//!
//! | variant            | `uᵏ` on the kept support `T_k`                          |
//! |--------------------|---------------------------------------------------------|
//! | NST+HT             | `x_T`                                                   |
//! | NST+HT+FB          | `x_T + (A_T*A_T)⁻¹A_T*A_{T^c}x_{T^c}`                   |
//! | NST+HT+subFB       | `x_T + λ A_T*A_{T^c}x_{T^c}`                            |
//! | NST+stretchedHT    | `θ x_T`, `θ = ‖b‖₁ / ‖A_T x_T‖₁`                        |
//!
//! A run stops when `‖Auᵏ − b‖₂/‖b‖₂ < ε₁` or `‖uᵏ − uᵏ⁻¹‖₂/‖uᵏ⁻¹‖₂ < ε₂`;
//! the feedback variant also stops once the selected support repeats.

mod adaptive;
mod baseline;
mod nst;

use serde::{Deserialize, Serialize};

pub use adaptive::solve_adaptive;
pub use baseline::{solve_htp, solve_iht, solve_omp, solve_sp};
pub use nst::{
    feedback_approximant, initial_iterate, nst_step, nst_step_projected, solve_nst_ht, solve_nst_ht_fb,
    solve_nst_ht_subfb, solve_nst_stretched_ht, stretch_factor, subfb_approximant,
};

use crate::error::{NstError, Result};
use crate::linalg::MeasurementOperator;
use crate::sparsity::SupportSet;

pub const DEFAULT_EPS1: f64 = 1e-5;
pub const DEFAULT_EPS2: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 1000;

/// Step length used by the suboptimal feedback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    Fixed(f64),
    /// `λᵏ = 1/‖A_{T_k}*A_{T_k}‖₂`, estimated by power iteration each step.
    Spectral,
}

impl Default for LambdaMode {
    fn default() -> Self {
        LambdaMode::Fixed(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub sparsity: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub max_iters: usize,
    pub lambda_mode: LambdaMode,
    /// Record per-iteration history in the result.
    pub trace: bool,
    /// Track `max_k ‖Axᵏ − b‖₂/‖b‖₂` over the run (costs one extra `A x` per step).
    pub check_feasibility: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sparsity: 1,
            eps1: DEFAULT_EPS1,
            eps2: DEFAULT_EPS2,
            max_iters: DEFAULT_MAX_ITERS,
            lambda_mode: LambdaMode::default(),
            trace: false,
            check_feasibility: false,
        }
    }
}

impl SolverConfig {
    pub fn new(sparsity: usize) -> Self {
        Self {
            sparsity,
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, eps1: f64, eps2: f64) -> Self {
        self.eps1 = eps1;
        self.eps2 = eps2;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_lambda(mut self, mode: LambdaMode) -> Self {
        self.lambda_mode = mode;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn with_feasibility_check(mut self, on: bool) -> Self {
        self.check_feasibility = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sparsity == 0 {
            return Err(NstError::InvalidConfig("sparsity must be at least 1".into()));
        }
        if !(self.eps1 > 0.0) || !(self.eps2 > 0.0) {
            return Err(NstError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(NstError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if let LambdaMode::Fixed(l) = self.lambda_mode {
            if !(l > 0.0) || !l.is_finite() {
                return Err(NstError::InvalidConfig("fixed lambda must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ResidualMet,
    Stagnated,
    MaxIters,
    SupportFixed,
    Failed(String),
}

impl Termination {
    pub fn label(&self) -> String {
        match self {
            Termination::ResidualMet => "residual_met".into(),
            Termination::Stagnated => "stagnated".into(),
            Termination::MaxIters => "max_iters".into(),
            Termination::SupportFixed => "support_fixed".into(),
            Termination::Failed(why) => format!("failed: {why}"),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::Failed(_))
    }
}

/// One recorded iteration: the sparse approximant and its stopping quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub residual_rel: f64,
    pub change_rel: f64,
    pub support: SupportSet,
    /// Values of `uᵏ` on `support`, in support order.
    pub values: Vec<f64>,
}

impl TraceEntry {
    pub(crate) fn new(iter: usize, residual_rel: f64, change_rel: f64, u: &[f64]) -> Self {
        let support = SupportSet::of_nonzeros(u);
        let values = support.indices().iter().map(|&i| u[i]).collect();
        Self {
            iter,
            residual_rel,
            change_rel,
            support,
            values,
        }
    }

    /// The approximant as a dense vector.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.support.ambient()];
        for (&i, &v) in self.support.indices().iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    /// Final sparse estimate.
    pub u: Vec<f64>,
    /// Iterate from which `u` was computed; feasible for the NST family.
    pub x: Vec<f64>,
    /// Number of approximants computed.
    pub iterations: usize,
    pub termination: Termination,
    pub residual_rel: f64,
    pub change_rel: f64,
    /// Sparsity level in force at termination (differs from the request for
    /// the adaptive wrapper).
    pub sparsity: usize,
    pub trace: Option<Vec<TraceEntry>>,
    pub max_feasibility_residual: Option<f64>,
}

/// The NST variants the adaptive wrapper can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NstVariant {
    Ht,
    HtFb,
    HtSubfb,
    StretchedHt,
}

impl NstVariant {
    pub fn solve(
        self,
        op: &MeasurementOperator,
        b: &[f64],
        cfg: &SolverConfig,
        x0: Option<&[f64]>,
    ) -> Result<RecoveryResult> {
        match self {
            NstVariant::Ht => solve_nst_ht(op, b, cfg, x0),
            NstVariant::HtFb => solve_nst_ht_fb(op, b, cfg, x0),
            NstVariant::HtSubfb => solve_nst_ht_subfb(op, b, cfg, x0),
            NstVariant::StretchedHt => solve_nst_stretched_ht(op, b, cfg, x0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NstVariant::Ht => "nst_ht",
            NstVariant::HtFb => "nst_ht_fb",
            NstVariant::HtSubfb => "nst_ht_subfb",
            NstVariant::StretchedHt => "nst_stretched_ht",
        }
    }
}

/// Settings for the sparsity-increasing wrapper: start at `s0`, add `s_step`
/// after each inner run that misses both tolerances, give up past `s_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub s0: usize,
    pub s_step: usize,
    pub s_max: usize,
    pub inner: SolverConfig,
    pub variant: NstVariant,
}

impl AdaptiveConfig {
    pub fn new(variant: NstVariant, s0: usize, s_step: usize, s_max: usize, inner: SolverConfig) -> Self {
        Self {
            s0,
            s_step,
            s_max,
            inner,
            variant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s0 == 0 || self.s_step == 0 {
            return Err(NstError::InvalidConfig("s0 and s_step must be at least 1".into()));
        }
        if self.s0 > self.s_max {
            return Err(NstError::InvalidConfig(format!(
                "s0 = {} exceeds s_max = {}",
                self.s0, self.s_max
            )));
        }
        SolverConfig {
            sparsity: self.s0,
            ..self.inner.clone()
        }
        .validate()
    }
}

/// Every solver behind one call signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NstHt,
    NstHtFb,
    NstHtSubfb,
    NstStretchedHt,
    Iht,
    Omp,
    Sp,
    Htp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::NstHt,
        Algorithm::NstHtFb,
        Algorithm::NstHtSubfb,
        Algorithm::NstStretchedHt,
        Algorithm::Iht,
        Algorithm::Omp,
        Algorithm::Sp,
        Algorithm::Htp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NstHt => "nst_ht",
            Algorithm::NstHtFb => "nst_ht_fb",
            Algorithm::NstHtSubfb => "nst_ht_subfb",
            Algorithm::NstStretchedHt => "nst_stretched_ht",
            Algorithm::Iht => "iht",
            Algorithm::Omp => "omp",
            Algorithm::Sp => "sp",
            Algorithm::Htp => "htp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn is_nst(self) -> bool {
        self.nst_variant().is_some()
    }

    pub fn nst_variant(self) -> Option<NstVariant> {
        match self {
            Algorithm::NstHt => Some(NstVariant::Ht),
            Algorithm::NstHtFb => Some(NstVariant::HtFb),
            Algorithm::NstHtSubfb => Some(NstVariant::HtSubfb),
            Algorithm::NstStretchedHt => Some(NstVariant::StretchedHt),
            _ => None,
        }
    }

    /// Runs the algorithm. Greedy baselines ignore `x0`.
    pub fn solve(
        self,
        op: &MeasurementOperator,
        b: &[f64],
        cfg: &SolverConfig,
        x0: Option<&[f64]>,
    ) -> Result<RecoveryResult> {
        match self {
            Algorithm::Iht => solve_iht(op, b, cfg, x0),
            Algorithm::Omp => solve_omp(op, b, cfg.sparsity),
            Algorithm::Sp => solve_sp(op, b, cfg.sparsity, cfg),
            Algorithm::Htp => solve_htp(op, b, cfg.sparsity, cfg),
            nst => nst.nst_variant().unwrap().solve(op, b, cfg, x0),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn check_inputs(op: &MeasurementOperator, b: &[f64], x0: Option<&[f64]>) -> Result<()> {
    crate::linalg::check_len(op.rows(), b.len())?;
    if let Some(x0) = x0 {
        crate::linalg::check_len(op.cols(), x0.len())?;
    }
    Ok(())
}

/// `‖b‖₂`, or 1 for a zero right-hand side so relative residuals stay finite.
pub(crate) fn residual_scale(b: &[f64]) -> f64 {
    let nb = crate::linalg::norm2(b);
    if nb > 0.0 {
        nb
    } else {
        1.0
    }
}

pub(crate) fn relative_change(u: &[f64], prev: Option<&[f64]>) -> f64 {
    match prev {
        Some(p) => {
            let np = crate::linalg::norm2(p);
            if np > 0.0 {
                crate::linalg::dist2(u, p) / np
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}
