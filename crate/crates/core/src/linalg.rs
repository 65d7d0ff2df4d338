//! Small dense row-major matrix and the symmetric factorizations used by
//! PCA and LDA.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. An empty slice yields 0×0.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn column_means(&self) -> Vec<T> {
        let mut means = vec![T::zero(); self.cols];
        for r in self.row_iter() {
            for (m, &v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = T::count(self.rows.max(1));
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Sample covariance `ZᵀZ / (n − 1)` of the column-centred matrix.
    pub fn covariance(&self) -> Result<Self> {
        if self.rows < 2 {
            return Err(Error::InsufficientData("covariance needs at least 2 rows".into()));
        }
        let means = self.column_means();
        let p = self.cols;
        let mut c = Self::zeros(p, p);
        let mut z = vec![T::zero(); p];
        for r in self.row_iter() {
            for j in 0..p {
                z[j] = r[j] - means[j];
            }
            for a in 0..p {
                for b in a..p {
                    c[(a, b)] += z[a] * z[b];
                }
            }
        }
        let denom = T::count(self.rows - 1);
        for a in 0..p {
            for b in a..p {
                let v = c[(a, b)] / denom;
                c[(a, b)] = v;
                c[(b, a)] = v;
            }
        }
        Ok(c)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| crate::scalar::total_cmp(&a[(i, col)].abs(), &a[(j, col)].abs()))
                .unwrap_or(col);
            if a[(pivot, col)] == T::zero() {
                return Ok(T::zero());
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                det = -det;
            }
            let d = a[(col, col)];
            det *= d;
            for i in col + 1..n {
                let f = a[(i, col)] / d;
                if f == T::zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Ok(det)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues, sorted descending.
    pub values: Vec<T>,
    /// Eigenvectors as columns, in the order of `values`. Each column's
    /// largest-magnitude entry is positive.
    pub vectors: Matrix<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Only the upper triangle is read; the input is assumed symmetric.
pub fn symmetric_eigen<T: Scalar>(m: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.cols(),
        });
    }
    let mut a = Matrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] });
    let mut v = Matrix::identity(n);

    let scale: T = a.as_slice().iter().map(|&x| x * x).sum();
    let tol = T::epsilon() * T::epsilon() * scale;

    let mut converged = n < 2;
    let mut off = T::zero();
    for _ in 0..MAX_SWEEPS {
        off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off <= tol || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let two = T::real(2.0);
                let theta = (aqq - app) / (two * apq);
                let t = if theta.is_infinite() {
                    T::zero()
                } else {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    a[(k, p)] = np;
                    a[(p, k)] = np;
                    a[(k, q)] = nq;
                    a[(q, k)] = nq;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            solver: "jacobi eigensolver",
            iterations: MAX_SWEEPS,
            last_change: off.sqrt().as_f64(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the original column order for equal eigenvalues.
    order.sort_by(|&i, &j| crate::scalar::total_cmp(&a[(j, j)], &a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    normalize_signs(&mut vectors);
    Ok(SymmetricEigen { values, vectors })
}

/// Flips each column so that its largest-magnitude entry is positive
/// (the first such entry on ties).
pub(crate) fn normalize_signs<T: Scalar>(vectors: &mut Matrix<T>) {
    for c in 0..vectors.cols() {
        let mut best = 0;
        for r in 1..vectors.rows() {
            if vectors[(r, c)].abs() > vectors[(best, c)].abs() {
                best = r;
            }
        }
        if vectors.rows() > 0 && vectors[(best, c)] < T::zero() {
            for r in 0..vectors.rows() {
                vectors[(r, c)] = -vectors[(r, c)];
            }
        }
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum.is_nan() || sum <= T::zero() {
                    return Err(Error::NotPositiveDefinite);
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with non-zero diagonal.
pub fn invert_lower<T: Scalar>(l: &Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    let mut inv = Matrix::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut sum = if i == col { T::one() } else { T::zero() };
            for k in col..i {
                sum -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = sum / l[(i, i)];
        }
    }
    inv
}

/// `log det A` and `A⁻¹` for a symmetric positive definite matrix.
pub fn spd_inverse<T: Scalar>(a: &Matrix<T>) -> Result<(T, Matrix<T>)> {
    let l = cholesky(a)?;
    let log_det = (0..l.rows()).map(|i| l[(i, i)].ln()).sum::<T>() * T::real(2.0);
    let li = invert_lower(&l);
    let inv = li.transpose().matmul(&li)?;
    Ok((log_det, inv))
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jacobi_reconstructs_input() {
        let a = Matrix::from_rows(&[
            [4.0, 1.0, -2.0, 2.0],
            [1.0, 2.0, 0.0, 1.0],
            [-2.0, 0.0, 3.0, -2.0],
            [2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let eig = symmetric_eigen(&a).unwrap();
        let d = Matrix::from_fn(4, 4, |i, j| if i == j { eig.values[i] } else { 0.0 });
        let rebuilt = eig
            .vectors
            .matmul(&d)
            .unwrap()
            .matmul(&eig.vectors.transpose())
            .unwrap();
        assert!(rebuilt.max_abs_diff(&a) < 1e-12);
        let vtv = eig.vectors.transpose().matmul(&eig.vectors).unwrap();
        assert!(vtv.max_abs_diff(&Matrix::identity(4)) < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn jacobi_diagonal_input_is_fixed_point() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 3.0]]).unwrap();
        let eig = symmetric_eigen(&a).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(eig.vectors[(1, 0)], 1.0);
        assert_eq!(eig.vectors[(0, 1)], 1.0);
    }

    #[test]
    fn cholesky_and_inverse() {
        let a = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        assert_abs_diff_eq!(l[(0, 0)], 2.0);
        assert_abs_diff_eq!(l[(1, 0)], 1.0);
        assert_abs_diff_eq!(l[(1, 1)], 2.0f64.sqrt(), epsilon = 1e-15);
        let (log_det, inv) = spd_inverse(&a).unwrap();
        assert_abs_diff_eq!(log_det, 8.0f64.ln(), epsilon = 1e-14);
        let prod = a.matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn determinant_matches_hand_values() {
        let a = Matrix::from_rows(&[[0.0, 2.0], [3.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(a.determinant().unwrap(), -6.0);
        let s = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_abs_diff_eq!(s.determinant().unwrap(), 0.0);
    }

    #[test]
    fn covariance_uses_n_minus_one() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 6.0]]).unwrap();
        let c = x.covariance().unwrap();
        assert_abs_diff_eq!(c[(0, 0)], 2.0);
        assert_abs_diff_eq!(c[(0, 1)], 4.0);
        assert_abs_diff_eq!(c[(1, 1)], 8.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(Matrix::from_rows(&rows).is_err());
    }
}
