use super::{initial_iterate, relative_change, AdaptiveConfig, RecoveryResult, SolverConfig, Termination};
use crate::error::{NstError, Result};
use crate::linalg::MeasurementOperator;

/// Sparsity-adaptive wrapper around any NST variant.
///
/// Runs the variant at `s0`, then keeps raising the sparsity by `s_step`,
/// warm-starting each run from the previous feasible iterate, while the
/// outer residual is at least `ε₁`, the outer change is at least `ε₂` and
/// the sparsity is at most `s_max`. Exhausting the cap is reported as
/// [`Termination::MaxIters`]. `iterations` and the trace accumulate over all
/// inner runs.
pub fn solve_adaptive(op: &MeasurementOperator, b: &[f64], acfg: &AdaptiveConfig) -> Result<RecoveryResult> {
    acfg.validate()?;
    super::check_inputs(op, b, None)?;
    let needs = acfg.s_max + acfg.s_step;
    let limit = match acfg.variant {
        super::NstVariant::HtFb => op.rows(),
        _ => op.cols(),
    };
    if needs > limit {
        return Err(NstError::InvalidConfig(format!(
            "s_max + s_step = {needs} exceeds the largest admissible sparsity {limit}"
        )));
    }

    let mut s = acfg.s0;
    let inner = |s: usize| SolverConfig {
        sparsity: s,
        ..acfg.inner.clone()
    };
    let x0 = initial_iterate(op, b)?;
    let mut res = acfg.variant.solve(op, b, &inner(s), Some(&x0))?;
    let mut total_iters = res.iterations;
    let mut trace = res.trace.take();
    let mut max_feas = res.max_feasibility_residual;
    let mut u_old = vec![0.0; op.cols()];
    let mut outer_change = relative_change(&res.u, Some(&u_old));

    while res.residual_rel >= acfg.inner.eps1 && outer_change >= acfg.inner.eps2 && s <= acfg.s_max {
        if res.termination.is_failure() {
            break;
        }
        u_old = std::mem::take(&mut res.u);
        s += acfg.s_step;
        let warm = std::mem::take(&mut res.x);
        res = acfg.variant.solve(op, b, &inner(s), Some(&warm))?;
        outer_change = relative_change(&res.u, Some(&u_old));
        if let (Some(all), Some(more)) = (trace.as_mut(), res.trace.take()) {
            all.extend(more.into_iter().map(|mut e| {
                e.iter += total_iters;
                e
            }));
        }
        total_iters += res.iterations;
        max_feas = match (max_feas, res.max_feasibility_residual) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
    if res.residual_rel >= acfg.inner.eps1
        && outer_change >= acfg.inner.eps2
        && s > acfg.s_max
        && !res.termination.is_failure()
    {
        res.termination = Termination::MaxIters;
    }
    res.iterations = total_iters;
    res.trace = trace;
    res.max_feasibility_residual = max_feas;
    res.sparsity = s;
    Ok(res)
}
