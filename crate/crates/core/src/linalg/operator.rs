use super::{axpy, check_len, dot, Cholesky, DenseMatrix};
use crate::error::{NstError, Result};
use crate::sparsity::SupportSet;

/// A full-row-rank `n × N` measurement matrix together with the cached
/// factorizations needed by the null-space step.
///
/// Holds the Cholesky factor of `AA*` and the explicit `N × n` matrix
/// `A*(AA*)⁻¹`, so both the projector `ℙ = I − A*(AA*)⁻¹A` and the
/// feasibility-restoring step are plain matrix-vector products. Immutable
/// once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    a: DenseMatrix,
    // Columns of A stored contiguously (Aᵀ row-major).
    columns: DenseMatrix,
    gram: Cholesky,
    pinv: DenseMatrix,
}

impl MeasurementOperator {
    /// Builds the operator, factoring `AA*`.
    pub fn new(a: DenseMatrix) -> Result<Self> {
        let (n, big_n) = (a.rows(), a.cols());
        if n >= big_n {
            return Err(NstError::InvalidConfig(format!(
                "measurement matrix must be wide (n < N), got {n}x{big_n}"
            )));
        }
        let gram = Cholesky::factor(&a.gram_rows()).map_err(|ratio| NstError::RankDeficient { ratio })?;
        let columns = a.transpose();
        let mut pinv = DenseMatrix::zeros(big_n, n);
        let mut buf = vec![0.0; n];
        for j in 0..big_n {
            buf.copy_from_slice(columns.row(j));
            gram.solve_in_place(&mut buf);
            for (i, &v) in buf.iter().enumerate() {
                pinv.set(j, i, v);
            }
        }
        Ok(Self {
            a,
            columns,
            gram,
            pinv,
        })
    }

    /// Number of measurements `n`.
    #[inline]
    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    /// Ambient dimension `N`.
    #[inline]
    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn gram_factor(&self) -> &Cholesky {
        &self.gram
    }

    /// The cached `N × n` matrix `A*(AA*)⁻¹`.
    pub fn pinv_applier(&self) -> &DenseMatrix {
        &self.pinv
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        self.columns.row(j)
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.column(j), &mut out);
            }
        }
        Ok(out)
    }

    /// `A_T v` for values `v` listed in support order.
    pub fn apply_on(&self, t: &SupportSet, values: &[f64]) -> Result<Vec<f64>> {
        check_len(t.len(), values.len())?;
        let mut out = vec![0.0; self.rows()];
        for (&j, &v) in t.indices().iter().zip(values) {
            axpy(v, self.column(j), &mut out);
        }
        Ok(out)
    }

    /// `A* y`.
    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        Ok((0..self.cols()).map(|j| dot(self.column(j), y)).collect())
    }

    /// `A_T* y`, one entry per support index.
    pub fn adjoint_on(&self, t: &SupportSet, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        Ok(t.indices().iter().map(|&j| dot(self.column(j), y)).collect())
    }

    /// `A*(AA*)⁻¹ y`.
    pub fn apply_pinv(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.pinv.matvec(y)
    }

    /// `(AA*)⁻¹ y` through the cached Cholesky factor.
    pub fn solve_gram(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        Ok(self.gram.solve(y))
    }

    /// `ℙz = z − A*(AA*)⁻¹Az`, the orthogonal projection onto `ker A`.
    pub fn project_nullspace(&self, z: &[f64]) -> Result<Vec<f64>> {
        let az = self.apply(z)?;
        let correction = self.apply_pinv(&az)?;
        Ok(z.iter().zip(&correction).map(|(a, b)| a - b).collect())
    }

    /// Least-squares coefficients `(A_T*A_T)⁻¹A_T* rhs` on the columns in `t`.
    pub fn lsq_submatrix(&self, t: &SupportSet, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), rhs.len())?;
        if t.ambient() != self.cols() {
            return Err(NstError::DimensionMismatch {
                expected: self.cols(),
                found: t.ambient(),
            });
        }
        if t.len() > self.rows() {
            return Err(NstError::SparsityTooLarge {
                s: t.len(),
                len: self.rows(),
            });
        }
        if t.is_empty() {
            return Ok(Vec::new());
        }
        let gram = self.column_gram(t);
        let chol = Cholesky::factor(&gram).map_err(|ratio| NstError::SingularSubmatrix { ratio })?;
        let mut coef = self.adjoint_on(t, rhs)?;
        chol.solve_in_place(&mut coef);
        Ok(coef)
    }

    /// `A_T* A_T`.
    pub fn column_gram(&self, t: &SupportSet) -> DenseMatrix {
        let idx = t.indices();
        let k = idx.len();
        let mut g = DenseMatrix::zeros(k, k);
        for p in 0..k {
            for q in 0..=p {
                let v = dot(self.column(idx[p]), self.column(idx[q]));
                g.set(p, q, v);
                g.set(q, p, v);
            }
        }
        g
    }

    /// `A_T` as a dense `n × |T|` matrix.
    pub fn submatrix(&self, t: &SupportSet) -> DenseMatrix {
        self.a.select_columns(t.indices())
    }
}
