//! Closed-form limits of the fixed-support iterations.
//!
//! Everything here goes through explicit eigendecomposition-based inverses
//! so that it stays independent of the Cholesky path used by the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{NstError, Result};
use crate::linalg::{sym_eigen, DenseMatrix, MeasurementOperator};
use crate::sparsity::{gather, SupportSet};

/// Tolerance on `‖AA* − I‖_max` for treating `A` as a Parseval frame.
pub const PARSEVAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSupportLimit {
    /// Limit of NST+HT with the support pinned to `support`.
    pub x_natural: Vec<f64>,
    /// Fixed point reached by one NST+HT+FB step on `support`.
    pub x_ddag: Vec<f64>,
    pub support: SupportSet,
}

fn eig_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let (vals, vecs) = sym_eigen(m);
    let k = vals.len();
    let max = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min = vals.first().copied().unwrap_or(0.0);
    if k > 0 && !(min > 1e-12 * max) {
        return Err(NstError::SingularSubmatrix {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    let mut inv = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let v: f64 = (0..k).map(|l| vecs.get(i, l) * vecs.get(j, l) / vals[l]).sum();
            inv.set(i, j, v);
        }
    }
    Ok(inv)
}

/// `‖AA* − I‖_max`.
pub fn parseval_deviation(op: &MeasurementOperator) -> f64 {
    op.matrix().gram_rows().max_abs_diff(&DenseMatrix::identity(op.rows()))
}

fn check_parseval(op: &MeasurementOperator) -> Result<()> {
    let deviation = parseval_deviation(op);
    if deviation > PARSEVAL_TOL {
        return Err(NstError::NotParseval { deviation });
    }
    Ok(())
}

// Pieces shared by both limits.
struct Split {
    a_t: DenseMatrix,
    x_t: Vec<f64>,
    // η = (A_T*A_T)⁻¹A_T* r, r = A_{T^c} x_{T^c}
    eta: Vec<f64>,
    // q = (I − A_T(A_T*A_T)⁻¹A_T*) r
    q: Vec<f64>,
}

fn split(op: &MeasurementOperator, t: &SupportSet, x_j: &[f64]) -> Result<Split> {
    crate::linalg::check_len(op.cols(), x_j.len())?;
    crate::linalg::check_len(op.cols(), t.ambient())?;
    let a_t = op.submatrix(t);
    let tc = t.complement();
    let r = op.submatrix(&tc).matvec(&gather(x_j, &tc)?)?;
    let ginv = eig_inverse(&a_t.transpose().matmul(&a_t)?)?;
    let eta = ginv.matvec(&a_t.matvec_t(&r)?)?;
    let fit = a_t.matvec(&eta)?;
    let q = crate::linalg::sub(&r, &fit);
    Ok(Split {
        x_t: gather(x_j, t)?,
        a_t,
        eta,
        q,
    })
}

fn assemble(t: &SupportSet, on_t: Vec<f64>, off_t: Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; t.ambient()];
    for (&i, v) in t.indices().iter().zip(on_t) {
        out[i] = v;
    }
    for (&i, v) in t.complement().indices().iter().zip(off_t) {
        out[i] = v;
    }
    out
}

/// `x^♮`: where NST+HT converges from `x_j` when every iteration keeps the
/// support `t`. Requires a Parseval frame.
///
/// `x^♮_T = x_T + (A_T*A_T)⁻¹A_T*A_{T^c}x_{T^c}`,
/// `x^♮_{T^c} = A_{T^c}*(I − A_T(A_T*A_T)⁻¹A_T*)A_{T^c}x_{T^c}`.
pub fn fixed_support_limit_ht(op: &MeasurementOperator, t: &SupportSet, x_j: &[f64]) -> Result<Vec<f64>> {
    check_parseval(op)?;
    let sp = split(op, t, x_j)?;
    let on_t: Vec<f64> = sp.x_t.iter().zip(&sp.eta).map(|(a, b)| a + b).collect();
    let tc = t.complement();
    let off_t = op.submatrix(&tc).matvec_t(&sp.q)?;
    Ok(assemble(t, on_t, off_t))
}

/// `x^‡`: the point one NST+HT+FB step on support `t` maps `x_j` to, and
/// which every further step on `t` leaves in place.
///
/// `x^‡_T = x_T + [(A_T*A_T)⁻¹A_T* + A_T*(AA*)⁻¹(I − P_T)]A_{T^c}x_{T^c}`,
/// `x^‡_{T^c} = A_{T^c}*(AA*)⁻¹(I − P_T)A_{T^c}x_{T^c}`,
/// with `P_T = A_T(A_T*A_T)⁻¹A_T*`.
pub fn fixed_support_limit_fb(op: &MeasurementOperator, t: &SupportSet, x_j: &[f64]) -> Result<Vec<f64>> {
    let sp = split(op, t, x_j)?;
    let w = eig_inverse(&op.matrix().gram_rows())?.matvec(&sp.q)?;
    let on_t: Vec<f64> = sp
        .x_t
        .iter()
        .zip(&sp.eta)
        .zip(sp.a_t.matvec_t(&w)?)
        .map(|((x, e), c)| x + e + c)
        .collect();
    let tc = t.complement();
    let off_t = op.submatrix(&tc).matvec_t(&w)?;
    Ok(assemble(t, on_t, off_t))
}

/// Both limits for a Parseval frame, where they coincide.
pub fn fixed_support_limits(op: &MeasurementOperator, t: &SupportSet, x_j: &[f64]) -> Result<FixedSupportLimit> {
    Ok(FixedSupportLimit {
        x_natural: fixed_support_limit_ht(op, t, x_j)?,
        x_ddag: fixed_support_limit_fb(op, t, x_j)?,
        support: t.clone(),
    })
}
