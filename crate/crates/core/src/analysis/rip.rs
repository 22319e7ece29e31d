use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NstError, Result};
use crate::linalg::{sym_eigenvalues, DenseMatrix, MeasurementOperator};

/// Largest number of supports an exhaustive scan will visit.
pub const EXHAUSTIVE_CAP: u128 = 1_000_000;

/// How supports are visited when computing `δ_s` and `γ_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RipMethod {
    /// Every support of size `s`; exact.
    Exhaustive,
    /// `count` uniformly drawn supports; the maxima are lower bounds.
    RandomSample { count: usize, seed: u64 },
}

impl RipMethod {
    pub fn is_exact(&self) -> bool {
        matches!(self, RipMethod::Exhaustive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    pub s: usize,
    pub delta_s: f64,
    pub gamma_s: f64,
    pub supports_checked: u64,
    pub method: RipMethod,
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

// Column Gram AᵀA and whitened Gram Aᵀ(AA*)⁻¹A, both N × N.
struct Grams {
    g: DenseMatrix,
    w: DenseMatrix,
}

impl Grams {
    fn new(op: &MeasurementOperator) -> Self {
        let a = op.matrix();
        let g = a.transpose().matmul(a).expect("square product");
        // B = L⁻¹A so that BᵀB = Aᵀ(AA*)⁻¹A.
        let chol = op.gram_factor();
        let mut bt = DenseMatrix::zeros(op.cols(), op.rows());
        for j in 0..op.cols() {
            let mut c = op.column(j).to_vec();
            chol.forward(&mut c);
            for (i, v) in c.into_iter().enumerate() {
                bt.set(j, i, v);
            }
        }
        let w = bt.matmul(&bt.transpose()).expect("square product");
        Self { g, w }
    }

    // (δ contribution, γ contribution) of one support.
    fn constants(&self, t: &[usize], want_delta: bool, want_gamma: bool) -> (f64, f64) {
        let k = t.len();
        let mut d = 0.0;
        let mut gm = 0.0;
        if want_delta {
            let mut m = DenseMatrix::zeros(k, k);
            for (p, &i) in t.iter().enumerate() {
                for (q, &j) in t.iter().enumerate() {
                    let id = if p == q { 1.0 } else { 0.0 };
                    m.set(p, q, id - self.g.get(i, j));
                }
            }
            d = sym_eigenvalues(&m).into_iter().map(f64::abs).fold(0.0, f64::max);
        }
        if want_gamma {
            let mut m = DenseMatrix::zeros(k, k);
            for (p, &i) in t.iter().enumerate() {
                for (q, &j) in t.iter().enumerate() {
                    let id = if p == q { 1.0 } else { 0.0 };
                    m.set(p, q, id - self.w.get(i, j));
                }
            }
            gm = sym_eigenvalues(&m).last().copied().unwrap_or(0.0).max(0.0);
        }
        (d, gm)
    }
}

// Advances `c` to the next k-combination of `lo..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn scan(op: &MeasurementOperator, s: usize, method: RipMethod, delta: bool, gamma: bool) -> Result<RipReport> {
    let n_cols = op.cols();
    if s == 0 {
        return Err(NstError::InvalidConfig("sparsity must be at least 1".into()));
    }
    if s > n_cols {
        return Err(NstError::SparsityTooLarge { s, len: n_cols });
    }
    let grams = Grams::new(op);
    let (d, g, checked) = match method {
        RipMethod::Exhaustive => {
            let total = binomial(n_cols, s);
            if total > EXHAUSTIVE_CAP {
                return Err(NstError::CombinatorialBlowup {
                    supports: total,
                    cap: EXHAUSTIVE_CAP,
                });
            }
            // Split the work by the smallest index of the support.
            let (d, g) = (0..=n_cols - s)
                .into_par_iter()
                .map(|first| {
                    let mut t: Vec<usize> = (first..first + s).collect();
                    let mut best = (0.0f64, 0.0f64);
                    loop {
                        let (d, g) = grams.constants(&t, delta, gamma);
                        best = (best.0.max(d), best.1.max(g));
                        if s == 1 || !next_combination(&mut t[1..], n_cols) {
                            break;
                        }
                    }
                    best
                })
                .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
            (d, g, total as u64)
        }
        RipMethod::RandomSample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let supports: Vec<Vec<usize>> = (0..count)
                .map(|_| {
                    let mut t = sample(&mut rng, n_cols, s).into_vec();
                    t.sort_unstable();
                    t
                })
                .collect();
            let (d, g) = supports
                .par_iter()
                .map(|t| grams.constants(t, delta, gamma))
                .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
            (d, g, count as u64)
        }
    };
    Ok(RipReport {
        s,
        delta_s: d,
        gamma_s: g,
        supports_checked: checked,
        method,
    })
}

/// `δ_s = max_{|T|=s} ‖I − A_T*A_T‖₂`.
pub fn rip_constant(op: &MeasurementOperator, s: usize, method: RipMethod) -> Result<f64> {
    Ok(scan(op, s, method, true, false)?.delta_s)
}

/// `γ_s = max_{|T|=s} λ_max(I − A_T*(AA*)⁻¹A_T)`, the largest eigenvalue of
/// the `T × T` block of the null-space projector.
pub fn prip_constant(op: &MeasurementOperator, s: usize, method: RipMethod) -> Result<f64> {
    Ok(scan(op, s, method, false, true)?.gamma_s)
}

/// `δ_s` and `γ_s` in one pass over the supports.
pub fn rip_report(op: &MeasurementOperator, s: usize, method: RipMethod) -> Result<RipReport> {
    scan(op, s, method, true, true)
}

/// Upper bound on `γ_s` in terms of `δ_s`: `1 − (1 − δ_s)/λ_max(AA*)`.
pub fn gamma_upper_bound(op: &MeasurementOperator, delta_s: f64) -> f64 {
    let lmax = sym_eigenvalues(&op.matrix().gram_rows()).last().copied().unwrap_or(0.0);
    1.0 - (1.0 - delta_s) / lmax
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(256, 128), u128::MAX);
        assert!(binomial(256, 30) > EXHAUSTIVE_CAP);
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all[5], vec![2, 3]);
    }
}
