use super::{
    check_inputs, relative_change, residual_scale, LambdaMode, RecoveryResult, SolverConfig, Termination,
    TraceEntry,
};
use crate::error::{NstError, Result};
use crate::linalg::{dist2, norm1, spectral_norm, MeasurementOperator};
use crate::sparsity::{restrict, select_support, SupportSet};

/// Minimum-norm feasible point `A*(AA*)⁻¹b`.
pub fn initial_iterate(op: &MeasurementOperator, b: &[f64]) -> Result<Vec<f64>> {
    op.apply_pinv(b)
}

/// Orthogonal projection of `u` onto `{x : Ax = b}`: `u + A*(AA*)⁻¹(b − Au)`.
pub fn nst_step(op: &MeasurementOperator, b: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    let au = op.apply(u)?;
    crate::linalg::check_len(au.len(), b.len())?;
    let r: Vec<f64> = b.iter().zip(&au).map(|(bi, ai)| bi - ai).collect();
    let mut x = op.apply_pinv(&r)?;
    for (xi, ui) in x.iter_mut().zip(u) {
        *xi += ui;
    }
    Ok(x)
}

/// The same step written as `x + ℙ(u − x)`; agrees with [`nst_step`]
/// whenever `x` is feasible.
pub fn nst_step_projected(op: &MeasurementOperator, u: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    crate::linalg::check_len(x.len(), u.len())?;
    let d: Vec<f64> = u.iter().zip(x).map(|(a, b)| a - b).collect();
    let pd = op.project_nullspace(&d)?;
    Ok(x.iter().zip(&pd).map(|(a, b)| a + b).collect())
}

/// `A_{T^c} x_{T^c}`: what the discarded tail contributes to the measurements.
fn tail_contribution(op: &MeasurementOperator, x: &[f64], t: &SupportSet) -> Vec<f64> {
    let mut out = vec![0.0; op.rows()];
    let mut keep = t.indices().iter().peekable();
    for (j, &xj) in x.iter().enumerate() {
        if keep.peek() == Some(&&j) {
            keep.next();
            continue;
        }
        if xj != 0.0 {
            crate::linalg::axpy(xj, op.column(j), &mut out);
        }
    }
    out
}

/// Hard thresholding plus least-squares feedback of the tail onto `im A_T`.
pub fn feedback_approximant(op: &MeasurementOperator, x: &[f64], t: &SupportSet) -> Result<Vec<f64>> {
    let tail = tail_contribution(op, x, t);
    let eta = op.lsq_submatrix(t, &tail)?;
    let mut u = restrict(x, t);
    for (&i, e) in t.indices().iter().zip(eta) {
        u[i] += e;
    }
    Ok(u)
}

/// Hard thresholding plus the scaled-adjoint feedback `λ A_T* A_{T^c} x_{T^c}`.
pub fn subfb_approximant(op: &MeasurementOperator, x: &[f64], t: &SupportSet, lambda: f64) -> Result<Vec<f64>> {
    let tail = tail_contribution(op, x, t);
    let fb = op.adjoint_on(t, &tail)?;
    let mut u = restrict(x, t);
    for (&i, f) in t.indices().iter().zip(fb) {
        u[i] += lambda * f;
    }
    Ok(u)
}

/// `θ = ‖b‖₁ / ‖A_T x_T‖₁`, falling back to 1 when the denominator is below
/// `1e-14 ‖b‖₁` (including the 0/0 case).
pub fn stretch_factor(op: &MeasurementOperator, b: &[f64], x: &[f64], t: &SupportSet) -> Result<f64> {
    let xt: Vec<f64> = t.indices().iter().map(|&i| x[i]).collect();
    let denom = norm1(&op.apply_on(t, &xt)?);
    let nb = norm1(b);
    if denom > 1e-14 * nb {
        Ok(nb / denom)
    } else {
        Ok(1.0)
    }
}

fn spectral_lambda(op: &MeasurementOperator, t: &SupportSet) -> f64 {
    let norm = match spectral_norm(&op.submatrix(t), 1e-6, 500) {
        Ok(v) => v,
        Err(NstError::NonConvergence { estimate }) => estimate,
        Err(_) => 0.0,
    };
    if norm > 0.0 {
        1.0 / (norm * norm)
    } else {
        0.0
    }
}

/// How the next iterate is formed from `uᵏ`.
pub(crate) enum Update {
    /// `xᵏ⁺¹ = uᵏ + A*(AA*)⁻¹(b − Auᵏ)`.
    NullSpace,
    /// `xᵏ⁺¹ = uᵏ + A*(b − Auᵏ)`.
    Gradient,
}

/// Shared loop for thresholding methods. `approx` maps `(xᵏ, T_k)` to `uᵏ`.
pub(crate) fn run_thresholding<F>(
    op: &MeasurementOperator,
    b: &[f64],
    cfg: &SolverConfig,
    x0: Option<&[f64]>,
    update: Update,
    stop_on_fixed_support: bool,
    mut approx: F,
) -> Result<RecoveryResult>
where
    F: FnMut(&[f64], &SupportSet) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    check_inputs(op, b, x0)?;
    let s = cfg.sparsity;
    if s > op.cols() {
        return Err(NstError::SparsityTooLarge { s, len: op.cols() });
    }
    let scale = residual_scale(b);
    let feasible = matches!(update, Update::NullSpace);

    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => initial_iterate(op, b)?,
    };
    let feasibility = |x: &[f64]| -> Result<f64> {
        let ax = op.apply(x)?;
        Ok(dist2(&ax, b) / scale)
    };
    let mut max_feas = if cfg.check_feasibility && feasible {
        Some(feasibility(&x)?)
    } else {
        None
    };
    let mut trace = cfg.trace.then(Vec::new);
    let mut u_prev: Option<Vec<f64>> = None;
    let mut t_prev: Option<SupportSet> = None;
    let mut last = (0.0, f64::INFINITY);

    let finish = |u: Vec<f64>, x: Vec<f64>, k: usize, term, last: (f64, f64), trace, max_feas| RecoveryResult {
        u,
        x,
        iterations: k,
        termination: term,
        residual_rel: last.0,
        change_rel: last.1,
        sparsity: s,
        trace,
        max_feasibility_residual: max_feas,
    };

    for k in 0..cfg.max_iters {
        if let Some(u) = u_prev.as_deref() {
            let next = match update {
                Update::NullSpace => nst_step(op, b, u)?,
                Update::Gradient => {
                    let au = op.apply(u)?;
                    let r: Vec<f64> = b.iter().zip(&au).map(|(bi, ai)| bi - ai).collect();
                    let g = op.adjoint(&r)?;
                    u.iter().zip(&g).map(|(a, b)| a + b).collect()
                }
            };
            if next.iter().any(|v| !v.is_finite()) {
                let u = u_prev.take().unwrap();
                return Ok(finish(u, x, k, Termination::Failed("non-finite iterate".into()), last, trace, max_feas));
            }
            x = next;
            if let Some(m) = max_feas.as_mut() {
                *m = m.max(feasibility(&x)?);
            }
        }

        let t = select_support(&x, s)?;
        let u = match approx(&x, &t) {
            Ok(u) => u,
            Err(e @ NstError::SingularSubmatrix { .. }) => {
                let u = u_prev.take().unwrap_or_else(|| vec![0.0; op.cols()]);
                return Ok(finish(u, x, k, Termination::Failed(e.to_string()), last, trace, max_feas));
            }
            Err(e) => return Err(e),
        };
        if u.iter().any(|v| !v.is_finite()) {
            let u = u_prev.take().unwrap_or_else(|| vec![0.0; op.cols()]);
            return Ok(finish(u, x, k, Termination::Failed("non-finite approximant".into()), last, trace, max_feas));
        }
        let residual = dist2(&op.apply(&u)?, b) / scale;
        let change = relative_change(&u, u_prev.as_deref());
        last = (residual, change);
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceEntry::new(k, residual, change, &u));
        }

        let term = if residual < cfg.eps1 {
            Some(Termination::ResidualMet)
        } else if stop_on_fixed_support && t_prev.as_ref() == Some(&t) {
            Some(Termination::SupportFixed)
        } else if change < cfg.eps2 {
            Some(Termination::Stagnated)
        } else {
            None
        };
        if let Some(term) = term {
            return Ok(finish(u, x, k + 1, term, last, trace, max_feas));
        }
        u_prev = Some(u);
        t_prev = Some(t);
    }
    let u = u_prev.unwrap_or_else(|| vec![0.0; op.cols()]);
    Ok(finish(u, x, cfg.max_iters, Termination::MaxIters, last, trace, max_feas))
}

/// NST with plain hard thresholding.
pub fn solve_nst_ht(
    op: &MeasurementOperator,
    b: &[f64],
    cfg: &SolverConfig,
    x0: Option<&[f64]>,
) -> Result<RecoveryResult> {
    run_thresholding(op, b, cfg, x0, Update::NullSpace, false, |x, t| Ok(restrict(x, t)))
}

/// NST with hard thresholding and least-squares feedback. Stops as soon as
/// the selected support repeats, since the iterate is then fixed.
pub fn solve_nst_ht_fb(
    op: &MeasurementOperator,
    b: &[f64],
    cfg: &SolverConfig,
    x0: Option<&[f64]>,
) -> Result<RecoveryResult> {
    if cfg.sparsity > op.rows() {
        return Err(NstError::SparsityTooLarge {
            s: cfg.sparsity,
            len: op.rows(),
        });
    }
    run_thresholding(op, b, cfg, x0, Update::NullSpace, true, |x, t| {
        feedback_approximant(op, x, t)
    })
}

/// NST with the Gram-free feedback `λ A_T* A_{T^c} x_{T^c}`.
pub fn solve_nst_ht_subfb(
    op: &MeasurementOperator,
    b: &[f64],
    cfg: &SolverConfig,
    x0: Option<&[f64]>,
) -> Result<RecoveryResult> {
    let mode = cfg.lambda_mode;
    run_thresholding(op, b, cfg, x0, Update::NullSpace, false, |x, t| {
        let lambda = match mode {
            LambdaMode::Fixed(l) => l,
            LambdaMode::Spectral => spectral_lambda(op, t),
        };
        subfb_approximant(op, x, t, lambda)
    })
}

/// NST with hard thresholding rescaled by `θᵏ = ‖b‖₁/‖A_T x_T‖₁`.
pub fn solve_nst_stretched_ht(
    op: &MeasurementOperator,
    b: &[f64],
    cfg: &SolverConfig,
    x0: Option<&[f64]>,
) -> Result<RecoveryResult> {
    run_thresholding(op, b, cfg, x0, Update::NullSpace, false, |x, t| {
        let theta = stretch_factor(op, b, x, t)?;
        let mut u = restrict(x, t);
        u.iter_mut().for_each(|v| *v *= theta);
        Ok(u)
    })
}
