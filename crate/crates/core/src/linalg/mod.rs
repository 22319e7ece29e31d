//! Dense real kernels: matrices, Cholesky solves, symmetric eigenvalues and
//! spectral-norm estimation.

mod io;
mod operator;

pub use io::{read_matrix, read_vector, write_matrix_binary, write_matrix_text, write_vector};
pub use operator::MeasurementOperator;

use crate::error::{NstError, Result};

/// Relative pivot threshold used by every Cholesky factorization.
pub const PIVOT_TOL: f64 = 1e-12;

/// Row-major dense real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(NstError::InvalidConfig(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(NstError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(NstError::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(NstError::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// Transposed product `selfᵀ * y`.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), &mut out);
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    /// `self * selfᵀ`, symmetric.
    pub fn gram_rows(&self) -> DenseMatrix {
        let n = self.rows;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g.data[i * n + j] = v;
                g.data[j * n + i] = v;
            }
        }
        g
    }

    /// Submatrix made of the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + k] = self.get(i, j);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(NstError::DimensionMismatch { expected, found })
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[inline]
pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `m`, failing when the smallest pivot drops below
    /// [`PIVOT_TOL`] times the largest. Pivots are the diagonal values before
    /// the square root is taken.
    pub fn factor(m: &DenseMatrix) -> std::result::Result<Self, f64> {
        let n = m.rows();
        let mut l = vec![0.0; n * n];
        let mut max_pivot = 0.0_f64;
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            let mut d = m.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            max_pivot = max_pivot.max(d);
            min_pivot = min_pivot.min(d);
            if !(d > PIVOT_TOL * max_pivot) || d <= 0.0 {
                let ratio = if max_pivot > 0.0 { d / max_pivot } else { 0.0 };
                return Err(ratio);
            }
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        // Later pivots may exceed earlier ones, so recheck against the final max.
        if min_pivot <= PIVOT_TOL * max_pivot {
            return Err(min_pivot / max_pivot);
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn factor_matrix(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.n,
            cols: self.n,
            data: self.l.clone(),
        }
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = b[i] - row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum::<f64>();
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let s = b[i] - (i + 1..n).map(|k| self.l[k * n + i] * b[k]).sum::<f64>();
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.forward(b);
        self.backward(b);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Eigenvalues (ascending) and eigenvectors (columns of the returned matrix)
/// of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigen(m: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = a.as_slice().iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, new, v.get(k, old));
        }
    }
    (values, vectors)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    sym_eigen(m).0
}

/// Estimates `‖m‖₂` by power iteration on `mᵀm`.
///
/// Stops once successive estimates of the top eigenvalue of `mᵀm` agree to
/// `tol / 10` relative. When `max_iters` runs out the best estimate is
/// returned inside [`NstError::NonConvergence`].
pub fn spectral_norm(m: &DenseMatrix, tol: f64, max_iters: usize) -> Result<f64> {
    let n = m.cols();
    // Deterministic start with no special alignment to coordinate axes.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64 + 1.0).sqrt()).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0_f64;
    for _ in 0..max_iters {
        let mv = m.matvec(&v)?;
        let w = m.matvec_t(&mv)?;
        let new_lambda = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        let converged = (new_lambda - lambda).abs() <= 0.1 * tol * new_lambda.abs();
        lambda = new_lambda;
        if converged {
            return Ok(lambda.max(0.0).sqrt());
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    Err(NstError::NonConvergence {
        estimate: lambda.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err();
        assert_eq!(err, NstError::NonFinite { index: 1 });
        assert!(DenseMatrix::new(1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn spectral_norm_diagonal() {
        let m = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = spectral_norm(&m, 1e-6, 500).unwrap();
        assert!((s - 3.0).abs() < 1e-6 * 3.0);
    }

    #[test]
    fn spectral_norm_symmetric_2x2() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = DenseMatrix::from_rows(&[vec![1.0, h], vec![h, 1.0]]).unwrap();
        let s = spectral_norm(&m, 1e-6, 500).unwrap();
        // Eigenvalues of [[1, c], [c, 1]] are 1 ± c.
        assert!((s - (1.0 + h)).abs() < 1e-6 * (1.0 + h));
    }

    #[test]
    fn spectral_norm_zero_matrix() {
        let m = DenseMatrix::zeros(3, 2);
        assert_eq!(spectral_norm(&m, 1e-6, 500).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_reports_non_convergence() {
        // Two equal top singular values with a third close behind converge slowly.
        let m = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.999, 0.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        match spectral_norm(&m, 1e-14, 3) {
            Err(NstError::NonConvergence { estimate }) => assert!(estimate > 0.5 && estimate <= 1.0),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let c = Cholesky::factor(&m).unwrap();
        let x = c.solve(&[2.0, 1.0]);
        let back = m.matvec(&x).unwrap();
        assert!((back[0] - 2.0).abs() < 1e-14 && (back[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_flags_singular() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(Cholesky::factor(&m).is_err());
    }

    #[test]
    fn jacobi_matches_closed_form() {
        let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = sym_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-13 && (ev[1] - 3.0).abs() < 1e-13);
        let (vals, vecs) = sym_eigen(&m);
        for (k, &val) in vals.iter().enumerate() {
            let col = vecs.column(k);
            let mv = m.matvec(&col).unwrap();
            for i in 0..2 {
                assert!((mv[i] - val * col[i]).abs() < 1e-12);
            }
        }
    }
}
