//! Comparison baselines: IHT, OMP, subspace pursuit and HTP in their
//! textbook forms.

use super::nst::{run_thresholding, Update};
use super::{check_inputs, relative_change, residual_scale, RecoveryResult, SolverConfig, Termination, TraceEntry};
use crate::error::{NstError, Result};
use crate::linalg::{norm2, MeasurementOperator};
use crate::sparsity::{restrict, scatter, select_support, SupportSet};

/// Iterative hard thresholding with unit step: `xᵏ⁺¹ = uᵏ + A*(b − Auᵏ)`.
/// Starts from the least-squares point like the NST family.
pub fn solve_iht(
    op: &MeasurementOperator,
    b: &[f64],
    cfg: &SolverConfig,
    x0: Option<&[f64]>,
) -> Result<RecoveryResult> {
    run_thresholding(op, b, cfg, x0, Update::Gradient, false, |x, t| Ok(restrict(x, t)))
}

struct Fit {
    support: SupportSet,
    u: Vec<f64>,
    residual: Vec<f64>,
}

fn fit_on(op: &MeasurementOperator, b: &[f64], t: SupportSet) -> Result<Fit> {
    let coef = op.lsq_submatrix(&t, b)?;
    let u = scatter(&coef, &t, op.cols())?;
    let au = op.apply_on(&t, &coef)?;
    let residual = b.iter().zip(&au).map(|(bi, ai)| bi - ai).collect();
    Ok(Fit { support: t, u, residual })
}

fn zero_result(op: &MeasurementOperator, b: &[f64], termination: Termination) -> RecoveryResult {
    let z = vec![0.0; op.cols()];
    RecoveryResult {
        u: z.clone(),
        x: z,
        iterations: 0,
        termination,
        residual_rel: norm2(b) / residual_scale(b),
        change_rel: f64::INFINITY,
        sparsity: 0,
        trace: None,
        max_feasibility_residual: None,
    }
}

fn failed(op: &MeasurementOperator, b: &[f64], best: Option<Fit>, k: usize, s: usize, e: NstError) -> Result<RecoveryResult> {
    match e {
        NstError::SingularSubmatrix { .. } | NstError::SparsityTooLarge { .. } => {
            let scale = residual_scale(b);
            let mut res = zero_result(op, b, Termination::Failed(e.to_string()));
            if let Some(f) = best {
                res.residual_rel = norm2(&f.residual) / scale;
                res.x = f.u.clone();
                res.u = f.u;
            }
            res.iterations = k;
            res.sparsity = s;
            Ok(res)
        }
        other => Err(other),
    }
}

/// Orthogonal matching pursuit. Runs exactly `s` greedy steps, each adding
/// the column most correlated with the residual and refitting by least
/// squares. `s = 0` returns the zero vector.
pub fn solve_omp(op: &MeasurementOperator, b: &[f64], s: usize) -> Result<RecoveryResult> {
    check_inputs(op, b, None)?;
    if s > op.rows() {
        return Err(NstError::SparsityTooLarge { s, len: op.rows() });
    }
    if s == 0 {
        return Ok(zero_result(op, b, Termination::MaxIters));
    }
    let scale = residual_scale(b);
    let mut chosen: Vec<usize> = Vec::with_capacity(s);
    let mut residual = b.to_vec();
    let mut best: Option<Fit> = None;
    let mut prev_u: Option<Vec<f64>> = None;
    let mut change = f64::INFINITY;
    for k in 0..s {
        let corr = op.adjoint(&residual)?;
        let pick = (0..op.cols())
            .filter(|j| !chosen.contains(j))
            .max_by(|&i, &j| corr[i].abs().total_cmp(&corr[j].abs()).then(j.cmp(&i)))
            .expect("fewer chosen columns than N");
        chosen.push(pick);
        let t = SupportSet::new(chosen.clone(), op.cols())?;
        let fit = match fit_on(op, b, t) {
            Ok(f) => f,
            Err(e) => return failed(op, b, best, k, s, e),
        };
        change = relative_change(&fit.u, prev_u.as_deref());
        prev_u = Some(fit.u.clone());
        residual = fit.residual.clone();
        best = Some(fit);
    }
    let fit = best.expect("s >= 1");
    let residual_rel = norm2(&fit.residual) / scale;
    Ok(RecoveryResult {
        x: fit.u.clone(),
        u: fit.u,
        iterations: s,
        termination: if residual_rel < super::DEFAULT_EPS1 {
            Termination::ResidualMet
        } else {
            Termination::MaxIters
        },
        residual_rel,
        change_rel: change,
        sparsity: s,
        trace: None,
        max_feasibility_residual: None,
    })
}

/// Subspace pursuit: keep a size-`s` support, expand it by the `s` columns
/// best correlated with the residual, refit, prune back to `s`, refit. Stops
/// when the residual no longer decreases or drops below `ε₁`.
pub fn solve_sp(op: &MeasurementOperator, b: &[f64], s: usize, cfg: &SolverConfig) -> Result<RecoveryResult> {
    check_inputs(op, b, None)?;
    if s > op.rows() {
        return Err(NstError::SparsityTooLarge { s, len: op.rows() });
    }
    if s == 0 {
        return Ok(zero_result(op, b, Termination::MaxIters));
    }
    let scale = residual_scale(b);
    let mut trace = cfg.trace.then(Vec::new);

    let t0 = select_support(&op.adjoint(b)?, s)?;
    let mut cur = match fit_on(op, b, t0) {
        Ok(f) => f,
        Err(e) => return failed(op, b, None, 0, s, e),
    };
    let mut cur_norm = norm2(&cur.residual);
    let mut change = f64::INFINITY;
    if let Some(tr) = trace.as_mut() {
        tr.push(TraceEntry::new(0, cur_norm / scale, change, &cur.u));
    }
    let mut k = 1;
    let termination = loop {
        if cur_norm / scale < cfg.eps1 {
            break Termination::ResidualMet;
        }
        if k >= cfg.max_iters {
            break Termination::MaxIters;
        }
        let extra = select_support(&op.adjoint(&cur.residual)?, s)?;
        let merged = cur.support.union(&extra);
        let wide = match fit_on(op, b, merged) {
            Ok(f) => f,
            Err(e) => return failed(op, b, Some(cur), k, s, e),
        };
        let pruned = select_support(&wide.u, s)?;
        let next = match fit_on(op, b, pruned) {
            Ok(f) => f,
            Err(e) => return failed(op, b, Some(cur), k, s, e),
        };
        let next_norm = norm2(&next.residual);
        if next_norm >= cur_norm {
            break Termination::Stagnated;
        }
        change = relative_change(&next.u, Some(&cur.u));
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceEntry::new(k, next_norm / scale, change, &next.u));
        }
        cur = next;
        cur_norm = next_norm;
        k += 1;
    };
    Ok(RecoveryResult {
        x: cur.u.clone(),
        u: cur.u,
        iterations: k,
        termination,
        residual_rel: cur_norm / scale,
        change_rel: change,
        sparsity: s,
        trace,
        max_feasibility_residual: None,
    })
}

/// Hard thresholding pursuit with unit step: select the `s` largest entries
/// of `xᵏ + A*(b − Axᵏ)`, then least-squares on that support. Stops when the
/// support repeats, the residual drops below `ε₁`, or `max_iters` is hit.
pub fn solve_htp(op: &MeasurementOperator, b: &[f64], s: usize, cfg: &SolverConfig) -> Result<RecoveryResult> {
    check_inputs(op, b, None)?;
    if s > op.rows() {
        return Err(NstError::SparsityTooLarge { s, len: op.rows() });
    }
    if s == 0 {
        return Ok(zero_result(op, b, Termination::MaxIters));
    }
    let scale = residual_scale(b);
    let mut trace = cfg.trace.then(Vec::new);
    let mut x = vec![0.0; op.cols()];
    let mut residual = b.to_vec();
    let mut prev: Option<SupportSet> = None;
    let mut best: Option<Fit> = None;
    let mut change = f64::INFINITY;
    for k in 0..cfg.max_iters {
        let g = op.adjoint(&residual)?;
        let probe: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + b).collect();
        let t = select_support(&probe, s)?;
        if prev.as_ref() == Some(&t) {
            let fit = best.expect("previous fit exists");
            return Ok(htp_result(fit, k, Termination::SupportFixed, change, scale, s, trace));
        }
        let fit = match fit_on(op, b, t.clone()) {
            Ok(f) => f,
            Err(e) => return failed(op, b, best, k, s, e),
        };
        change = relative_change(&fit.u, best.as_ref().map(|f| f.u.as_slice()));
        let res_rel = norm2(&fit.residual) / scale;
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceEntry::new(k, res_rel, change, &fit.u));
        }
        x = fit.u.clone();
        residual = fit.residual.clone();
        prev = Some(t);
        best = Some(fit);
        if res_rel < cfg.eps1 {
            return Ok(htp_result(best.unwrap(), k + 1, Termination::ResidualMet, change, scale, s, trace));
        }
    }
    Ok(htp_result(best.unwrap(), cfg.max_iters, Termination::MaxIters, change, scale, s, trace))
}

fn htp_result(
    fit: Fit,
    iterations: usize,
    termination: Termination,
    change: f64,
    scale: f64,
    s: usize,
    trace: Option<Vec<TraceEntry>>,
) -> RecoveryResult {
    RecoveryResult {
        residual_rel: norm2(&fit.residual) / scale,
        x: fit.u.clone(),
        u: fit.u,
        iterations,
        termination,
        change_rel: change,
        sparsity: s,
        trace,
        max_feasibility_residual: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2, DenseMatrix};

    fn op_2x3() -> MeasurementOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        MeasurementOperator::new(DenseMatrix::from_rows(&[vec![1.0, 0.0, h], vec![0.0, 1.0, h]]).unwrap()).unwrap()
    }

    #[test]
    fn iht_first_step_by_hand() {
        let op = MeasurementOperator::new(DenseMatrix::from_rows(&[vec![2.0, 1.0]]).unwrap()).unwrap();
        let cfg = SolverConfig::new(1).with_max_iters(2).with_trace(true);
        let res = solve_iht(&op, &[2.0], &cfg, Some(&[0.8, 0.4])).unwrap();
        let tr = res.trace.unwrap();
        assert_eq!(tr[0].dense(), vec![0.8, 0.0]);
        // x¹ = [0.8, 0] + [2, 1]ᵀ·0.4 = [1.6, 0.4], so u¹ = [1.6, 0]
        assert!((tr[1].dense()[0] - 1.6).abs() < 1e-15);
        assert!((res.x[0] - 1.6).abs() < 1e-15 && (res.x[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn one_sparse_problem_recovered_by_greedy_methods() {
        let op = op_2x3();
        let truth = [0.0, 3.0, 0.0];
        let b = op.apply(&truth).unwrap();
        let cfg = SolverConfig::new(1);
        for res in [
            solve_omp(&op, &b, 1).unwrap(),
            solve_sp(&op, &b, 1, &cfg).unwrap(),
            solve_htp(&op, &b, 1, &cfg).unwrap(),
        ] {
            assert!(dist2(&res.u, &truth) < 1e-12, "{res:?}");
        }
    }

    #[test]
    fn omp_first_pick_is_true_column() {
        let op = op_2x3();
        let truth = [0.0, 3.0, 0.0];
        let b = op.apply(&truth).unwrap();
        let res = solve_omp(&op, &b, 1).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(SupportSet::of_nonzeros(&res.u).indices(), &[1]);
        assert_eq!(res.termination, Termination::ResidualMet);
    }

    #[test]
    fn omp_single_equation_is_exact() {
        // Both columns of [2, 1] explain b exactly; the larger correlation wins.
        let op = MeasurementOperator::new(DenseMatrix::from_rows(&[vec![2.0, 1.0]]).unwrap()).unwrap();
        let res = solve_omp(&op, &[3.0], 1).unwrap();
        assert!(res.residual_rel < 1e-15);
        assert_eq!(crate::sparsity::l0(&res.u), 1);
    }

    #[test]
    fn zero_sparsity_returns_zero() {
        let op = op_2x3();
        let b = [1.0, 2.0];
        let cfg = SolverConfig::new(1);
        for res in [
            solve_omp(&op, &b, 0).unwrap(),
            solve_sp(&op, &b, 0, &cfg).unwrap(),
            solve_htp(&op, &b, 0, &cfg).unwrap(),
        ] {
            assert_eq!(res.u, vec![0.0; 3]);
            assert!((res.residual_rel - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn omp_runs_exactly_s_steps() {
        let op = op_2x3();
        let res = solve_omp(&op, &[1.0, -2.0], 2).unwrap();
        assert_eq!(res.iterations, 2);
        assert!(res.residual_rel < 1e-12);
    }

    #[test]
    fn sparsity_above_rows_rejected() {
        let op = op_2x3();
        assert!(solve_omp(&op, &[1.0, 1.0], 3).is_err());
    }
}
