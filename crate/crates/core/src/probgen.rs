//! Seeded random problem instances.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`. Values
//! are consumed in a fixed order: the matrix (row-major), the support
//! (partial Fisher–Yates over `0..N`), the nonzero values in support-draw
//! order, then the noise vector. Normal variates come from Box–Muller, using
//! both outputs of each pair in turn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NstError, Result};
use crate::linalg::{norm2, DenseMatrix, MeasurementOperator};
use crate::sparsity::SupportSet;

/// Distribution of the nonzero entries of the sparse signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Standard normal values.
    Gaussian,
    /// `±1` with equal probability.
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    /// `b = A(x♯ + v)` with `‖x♯‖₂ = 1`, `v ∈ ℝᴺ`.
    SignalContaminated,
    /// `b = Ax♯ + v` with `‖Ax♯‖₂ = 1`, `v ∈ ℝⁿ`.
    MeasurementContaminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// `‖v‖₂`.
    #[serde(default)]
    pub eps: f64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn signal(eps: f64) -> Self {
        Self {
            kind: NoiseKind::SignalContaminated,
            eps,
        }
    }

    pub fn measurement(eps: f64) -> Self {
        Self {
            kind: NoiseKind::MeasurementContaminated,
            eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub s: usize,
    pub ensemble: Ensemble,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(n: usize, big_n: usize, s: usize, ensemble: Ensemble) -> Self {
        Self {
            n,
            big_n,
            s,
            ensemble,
            noise: NoiseSpec::none(),
            seed: 0,
        }
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.s == 0 {
            return Err(NstError::InvalidConfig("n and s must be positive".into()));
        }
        if !(self.s <= self.n && self.n < self.big_n) {
            return Err(NstError::InvalidConfig(format!(
                "need s <= n < N, got s = {}, n = {}, N = {}",
                self.s, self.n, self.big_n
            )));
        }
        if !(self.noise.eps >= 0.0) || !self.noise.eps.is_finite() {
            return Err(NstError::InvalidConfig("noise level must be finite and non-negative".into()));
        }
        Ok(())
    }
}

pub struct GeneratedProblem {
    pub op: MeasurementOperator,
    /// `x♯`, exactly `s`-sparse.
    pub x_true: Vec<f64>,
    /// Empty when the spec has no noise.
    pub noise_v: Vec<f64>,
    pub b: Vec<f64>,
    pub support: SupportSet,
}

/// Standard normal sampler; Box–Muller with the second value cached.
pub struct Normal {
    spare: Option<f64>,
}

impl Normal {
    pub fn new() -> Self {
        Self { spare: None }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 − U lies in (0, 1], keeping the log finite.
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

impl Default for Normal {
    fn default() -> Self {
        Self::new()
    }
}

fn gaussian_entries(rng: &mut ChaCha8Rng, normal: &mut Normal, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| normal.sample(rng)).collect();
    DenseMatrix::new(rows, cols, data).expect("finite normal samples")
}

fn normalize_columns(a: &mut DenseMatrix) {
    for j in 0..a.cols() {
        let norm = norm2(&a.column(j));
        if norm > 0.0 {
            for i in 0..a.rows() {
                a.set(i, j, a.get(i, j) / norm);
            }
        }
    }
}

fn scale_to(v: &mut [f64], target: f64) {
    let norm = norm2(v);
    if norm > 0.0 {
        let f = target / norm;
        v.iter_mut().for_each(|x| *x *= f);
    }
}

/// `n × N` matrix with i.i.d. standard normal entries and unit-norm columns.
pub fn gaussian_matrix(n: usize, big_n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = gaussian_entries(&mut rng, &mut Normal::new(), n, big_n);
    normalize_columns(&mut a);
    a
}

/// `n × N` matrix with orthonormal rows (`AA* = I`), from Gram–Schmidt on
/// the rows of a Gaussian matrix, applied twice for accuracy.
pub fn parseval_frame(n: usize, big_n: usize, seed: u64) -> Result<DenseMatrix> {
    if n > big_n {
        return Err(NstError::InvalidConfig("a Parseval frame needs n <= N".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_entries(&mut rng, &mut Normal::new(), n, big_n);
    let mut rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for i in 0..n {
        for _pass in 0..2 {
            for j in 0..i {
                let c = crate::linalg::dot(&rows[i], &rows[j]);
                let (head, tail) = rows.split_at_mut(i);
                crate::linalg::axpy(-c, &head[j], &mut tail[0]);
            }
        }
        let norm = norm2(&rows[i]);
        if !(norm > 1e-12) {
            return Err(NstError::RankDeficient { ratio: norm });
        }
        rows[i].iter_mut().for_each(|x| *x /= norm);
    }
    DenseMatrix::from_rows(&rows)
}

/// Draws one instance. Same spec, same output, bit for bit.
pub fn generate(spec: &ProblemSpec) -> Result<GeneratedProblem> {
    spec.validate()?;
    let (n, big_n, s) = (spec.n, spec.big_n, spec.s);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = Normal::new();

    let mut a = gaussian_entries(&mut rng, &mut normal, n, big_n);
    normalize_columns(&mut a);

    let mut perm: Vec<usize> = (0..big_n).collect();
    for i in 0..s {
        let j = rng.random_range(i..big_n);
        perm.swap(i, j);
    }
    let mut x = vec![0.0; big_n];
    for &i in &perm[..s] {
        x[i] = match spec.ensemble {
            Ensemble::Gaussian => normal.sample(&mut rng),
            Ensemble::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
    }
    let support = SupportSet::new(perm[..s].to_vec(), big_n)?;

    let op = MeasurementOperator::new(a)?;
    let eps = spec.noise.eps;
    let (noise_v, b) = match spec.noise.kind {
        NoiseKind::None => (Vec::new(), op.apply(&x)?),
        NoiseKind::SignalContaminated => {
            scale_to(&mut x, 1.0);
            let mut v: Vec<f64> = (0..big_n).map(|_| normal.sample(&mut rng)).collect();
            if eps > 0.0 {
                scale_to(&mut v, eps);
            } else {
                v.iter_mut().for_each(|e| *e = 0.0);
            }
            let xv: Vec<f64> = x.iter().zip(&v).map(|(p, q)| p + q).collect();
            let b = op.apply(&xv)?;
            (v, b)
        }
        NoiseKind::MeasurementContaminated => {
            let ax = op.apply(&x)?;
            let f = 1.0 / norm2(&ax);
            x.iter_mut().for_each(|e| *e *= f);
            let mut b: Vec<f64> = ax.iter().map(|e| e * f).collect();
            let mut v: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
            if eps > 0.0 {
                scale_to(&mut v, eps);
            } else {
                v.iter_mut().for_each(|e| *e = 0.0);
            }
            crate::linalg::axpy(1.0, &v, &mut b);
            (v, b)
        }
    };
    Ok(GeneratedProblem {
        op,
        x_true: x,
        noise_v,
        b,
        support,
    })
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master`: the splitmix64 output for state
/// `master + (index + 1)·0x9E3779B97F4A7C15`.
///
/// For a fixed master this is a bijection of the index, so distinct trials
/// never share a seed.
pub fn derive_trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
