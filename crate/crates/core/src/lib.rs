//! Sparse recovery by null-space tuning with hard thresholding and feedback.
//!
//! The solvers recover an `s`-sparse `x` from underdetermined measurements
//! `b = Ax` (`A` is `n × N`, `n < N`, full row rank). Each NST iteration
//! thresholds the current feasible iterate and projects the sparse
//! approximant back onto the affine set `{x : Ax = b}`. See [`solvers`] for
//! the variants and baselines, [`analysis`] for the restricted-isometry
//! constants and convergence certificates, [`probgen`] for seeded random
//! instances and [`bench`] for the experiment runners.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod sparsity;
pub mod analysis;
pub mod probgen;
pub mod bench;
pub mod solvers;

pub use error::{NstError, Result};
pub use linalg::{DenseMatrix, MeasurementOperator};
pub use solvers::{
    solve_adaptive, AdaptiveConfig, Algorithm, LambdaMode, NstVariant, RecoveryResult, SolverConfig, Termination,
};
pub use sparsity::{hard_threshold, select_support, SupportSet};
