//! Restricted-isometry constants, convergence certificates and the
//! closed-form fixed-support limits, for checking the solvers on small
//! instances.

mod limits;
mod rip;

use serde::{Deserialize, Serialize};

pub use limits::{
    fixed_support_limit_fb, fixed_support_limit_ht, fixed_support_limits, parseval_deviation, FixedSupportLimit,
    PARSEVAL_TOL,
};
pub use rip::{
    binomial, gamma_upper_bound, prip_constant, rip_constant, rip_report, RipMethod, RipReport, EXHAUSTIVE_CAP,
};

use crate::error::{NstError, Result};
use crate::linalg::MeasurementOperator;

/// Contraction factors for NST+HT and NST+HT+FB at sparsity `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub s: usize,
    pub delta_s: f64,
    pub delta_2s: f64,
    pub gamma_3s: f64,
    /// `2γ₃ₛ`
    pub rho_ht: f64,
    /// `√2·γ₃ₛ/(1 − δ₂ₛ)`
    pub rho_fb: f64,
    /// `(√2 + √(1 + δ_s))/(1 − δ₂ₛ)`
    pub tau_fb: f64,
    /// `γ₃ₛ < 0.5`
    pub ht_condition_met: bool,
    /// `δ₂ₛ + √2·γ₃ₛ < 1`
    pub fb_condition_met: bool,
    /// True when the constants came from exhaustive enumeration; sampled
    /// constants are lower bounds and the flags are then optimistic.
    pub exact: bool,
}

impl ConvergenceCertificate {
    pub fn from_constants(s: usize, delta_s: f64, delta_2s: f64, gamma_3s: f64, exact: bool) -> Self {
        let sqrt2 = std::f64::consts::SQRT_2;
        let rho_ht = 2.0 * gamma_3s;
        let denom = 1.0 - delta_2s;
        let (rho_fb, tau_fb) = if denom > 0.0 {
            (sqrt2 * gamma_3s / denom, (sqrt2 + (1.0 + delta_s).sqrt()) / denom)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        Self {
            s,
            delta_s,
            delta_2s,
            gamma_3s,
            rho_ht,
            rho_fb,
            tau_fb,
            ht_condition_met: gamma_3s < 0.5,
            fb_condition_met: delta_2s + sqrt2 * gamma_3s < 1.0 && rho_fb < 1.0,
            exact,
        }
    }
}

/// Computes `δ_s`, `δ₂ₛ`, `γ₃ₛ` and the derived certificate. Needs `3s ≤ N`.
pub fn certificate(op: &MeasurementOperator, s: usize, method: RipMethod) -> Result<ConvergenceCertificate> {
    if 3 * s > op.cols() {
        return Err(NstError::SparsityTooLarge {
            s: 3 * s,
            len: op.cols(),
        });
    }
    let delta_s = rip_constant(op, s, method)?;
    let delta_2s = rip_constant(op, 2 * s, method)?;
    let gamma_3s = prip_constant(op, 3 * s, method)?;
    Ok(ConvergenceCertificate::from_constants(
        s,
        delta_s,
        delta_2s,
        gamma_3s,
        method.is_exact(),
    ))
}

fn bound(rho: f64, c: f64, u0_err: f64, e_tilde_norm: f64, k: u32) -> Result<f64> {
    if !(rho < 1.0) {
        return Err(NstError::ConditionNotMet { rho });
    }
    Ok(rho.powi(k as i32) * u0_err + c * e_tilde_norm)
}

/// `ρᵏ‖u⁰ − x♯‖ + 2/(1 − ρ)·‖ẽ‖` with `ρ = 2γ₃ₛ`.
pub fn error_bound_ht(cert: &ConvergenceCertificate, u0_err: f64, e_tilde_norm: f64, k: u32) -> Result<f64> {
    if !cert.ht_condition_met {
        return Err(NstError::ConditionNotMet { rho: cert.rho_ht });
    }
    let rho = cert.rho_ht;
    bound(rho, 2.0 / (1.0 - rho), u0_err, e_tilde_norm, k)
}

/// `ρᵏ‖u⁰ − x♯‖ + τ/(1 − ρ)·‖ẽ‖` with the feedback `ρ`, `τ`.
pub fn error_bound_fb(cert: &ConvergenceCertificate, u0_err: f64, e_tilde_norm: f64, k: u32) -> Result<f64> {
    if !cert.fb_condition_met {
        return Err(NstError::ConditionNotMet { rho: cert.rho_fb });
    }
    let rho = cert.rho_fb;
    bound(rho, cert.tau_fb / (1.0 - rho), u0_err, e_tilde_norm, k)
}

/// The two norms of the effective error `r = A(x − x♯) + e` used by the
/// bounds: `‖(AA*)^{−1/2} r‖₂` for NST+HT and `‖r‖₂` for NST+HT+FB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ETildeNorms {
    pub preconditioned: f64,
    pub plain: f64,
}

/// `x` is the (possibly non-sparse) signal, `x_sharp` its sparse target and
/// `e` the measurement noise.
pub fn e_tilde_norms(op: &MeasurementOperator, x: &[f64], x_sharp: &[f64], e: &[f64]) -> Result<ETildeNorms> {
    crate::linalg::check_len(op.rows(), e.len())?;
    let diff = crate::linalg::sub(x, x_sharp);
    let mut r = op.apply(&diff)?;
    crate::linalg::axpy(1.0, e, &mut r);
    let plain = crate::linalg::norm2(&r);
    // ‖(AA*)^{−1/2}r‖² = rᵀ(AA*)⁻¹r = ‖L⁻¹r‖² for AA* = LLᵀ.
    op.gram_factor().forward(&mut r);
    Ok(ETildeNorms {
        preconditioned: crate::linalg::norm2(&r),
        plain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::sparsity::SupportSet;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn three_col() -> MeasurementOperator {
        MeasurementOperator::new(DenseMatrix::from_rows(&[vec![1.0, 0.0, H], vec![0.0, 1.0, H]]).unwrap()).unwrap()
    }

    #[test]
    fn delta_examples() {
        let op = three_col();
        assert!(rip_constant(&op, 1, RipMethod::Exhaustive).unwrap().abs() < 1e-12);
        let d2 = rip_constant(&op, 2, RipMethod::Exhaustive).unwrap();
        assert!((d2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let rep = rip_report(&op, 2, RipMethod::Exhaustive).unwrap();
        assert_eq!(rep.supports_checked, 3);
    }

    #[test]
    fn gamma_example() {
        let op = three_col();
        let g1 = prip_constant(&op, 1, RipMethod::Exhaustive).unwrap();
        assert!((g1 - 0.5).abs() < 1e-12, "{g1}");
    }

    #[test]
    fn blowup_is_reported() {
        let a = DenseMatrix::new(2, 60, (0..120).map(|i| ((i * 7 % 13) as f64) - 6.0).collect()).unwrap();
        let op = MeasurementOperator::new(a).unwrap();
        let err = rip_constant(&op, 10, RipMethod::Exhaustive).unwrap_err();
        assert!(matches!(err, NstError::CombinatorialBlowup { .. }));
        let sampled = rip_report(&op, 10, RipMethod::RandomSample { count: 5, seed: 1 }).unwrap();
        assert_eq!(sampled.supports_checked, 5);
    }

    #[test]
    fn certificate_formulas() {
        let c = ConvergenceCertificate::from_constants(1, 0.0, 0.0, 0.0, true);
        assert_eq!(c.rho_fb, 0.0);
        assert!((c.tau_fb - (std::f64::consts::SQRT_2 + 1.0)).abs() < 1e-15);
        let c = ConvergenceCertificate::from_constants(1, 0.0, 0.0, 0.5, true);
        assert!(!c.ht_condition_met);
        assert_eq!(c.rho_ht, 1.0);
        let c = ConvergenceCertificate::from_constants(1, 0.1, 0.2, 0.3, true);
        assert!(c.ht_condition_met);
        assert!((c.rho_ht - 0.6).abs() < 1e-15);
    }

    #[test]
    fn bounds() {
        let c = ConvergenceCertificate::from_constants(1, 0.0, 0.0, 0.3, true);
        assert_eq!(error_bound_ht(&c, 1.7, 0.0, 0).unwrap(), 1.7);
        let b = error_bound_ht(&c, 1.0, 0.0, 5).unwrap();
        assert!((b - 0.07776).abs() < 1e-12);
        let b = error_bound_ht(&c, 0.0, 0.1, 3).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
        let bad = ConvergenceCertificate::from_constants(1, 0.0, 0.0, 0.6, true);
        assert!(matches!(error_bound_ht(&bad, 1.0, 0.0, 1), Err(NstError::ConditionNotMet { .. })));
        // √2·0.6 < 1, so the feedback bound still applies here.
        assert!(error_bound_fb(&bad, 1.0, 0.0, 1).is_ok());
        let worse = ConvergenceCertificate::from_constants(1, 0.0, 0.0, 0.75, true);
        assert!(error_bound_fb(&worse, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn certificate_needs_room() {
        let op = three_col();
        assert!(certificate(&op, 2, RipMethod::Exhaustive).is_err());
        let c = certificate(&op, 1, RipMethod::Exhaustive).unwrap();
        // γ₃ of a 2×3 matrix is the largest eigenvalue of the rank-one projector.
        assert!((c.gamma_3s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn limits_on_supported_input() {
        let op = three_col();
        let t = SupportSet::new(vec![0, 2], 3).unwrap();
        let x = [0.5, 0.0, -1.0];
        let fb = fixed_support_limit_fb(&op, &t, &x).unwrap();
        assert!(crate::linalg::dist2(&fb, &x) < 1e-14);
        assert!(matches!(
            fixed_support_limit_ht(&op, &t, &x),
            Err(NstError::NotParseval { .. })
        ));
    }

    #[test]
    fn e_tilde_on_identity_rows() {
        let op = MeasurementOperator::new(
            DenseMatrix::from_rows(&[vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap(),
        )
        .unwrap();
        let n = e_tilde_norms(&op, &[1.0, 0.0, 0.0], &[0.0; 3], &[0.0, 0.0]).unwrap();
        assert!((n.plain - 2.0).abs() < 1e-15);
        assert!((n.preconditioned - 1.0).abs() < 1e-15);
    }
}
