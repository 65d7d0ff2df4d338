//! Principal component analysis by eigendecomposition of the sample
//! covariance matrix.

use serde::{Deserialize, Serialize};

use super::{LinearTransform, TransformKind};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Scalar;

/// How many principal components to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Components {
    Fixed(usize),
    /// Smallest `k` whose cumulative explained variance reaches the threshold.
    VarianceThreshold(f64),
    All,
}

impl Default for Components {
    fn default() -> Self {
        Components::VarianceThreshold(0.95)
    }
}

/// Center, form `C = ZᵀZ/(n−1)`, eigendecompose, sort descending and keep the
/// leading eigenvectors. Each eigenvector's largest-magnitude entry is made
/// positive.
pub fn pca_fit<T: Scalar>(x: &Matrix<T>, components: Components) -> Result<LinearTransform<T>> {
    if x.rows() < 2 {
        return Err(Error::InsufficientData(format!(
            "PCA needs at least 2 samples, found {}",
            x.rows()
        )));
    }
    let p = x.cols();
    let means = x.column_means();
    let cov = x.covariance()?;
    let eig = symmetric_eigen(&cov)?;
    // Round-off can leave tiny negative eigenvalues on rank-deficient data.
    let values: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
    let total: T = values.iter().copied().sum();
    let k = match components {
        Components::All => p,
        Components::Fixed(k) if (1..=p).contains(&k) => k,
        Components::Fixed(k) => return Err(Error::invalid(format!("k = {k} outside 1..={p}"))),
        Components::VarianceThreshold(t) if t > 0.0 && t <= 1.0 => {
            if total == T::zero() {
                1
            } else {
                let mut acc = 0.0;
                let mut k = p;
                for (i, v) in values.iter().enumerate() {
                    acc += v.as_f64() / total.as_f64();
                    if acc >= t - 1e-12 {
                        k = i + 1;
                        break;
                    }
                }
                k
            }
        }
        Components::VarianceThreshold(t) => {
            return Err(Error::invalid(format!("variance threshold {t} outside (0, 1]")))
        }
    };
    let w = Matrix::from_fn(p, k, |i, j| eig.vectors[(i, j)]);
    Ok(LinearTransform {
        kind: TransformKind::Pca,
        column_means: means,
        w,
        values: values[..k].to_vec(),
        total,
    })
}

/// Share of the total variance captured by each kept component.
pub fn explained_variance_ratio<T: Scalar>(t: &LinearTransform<T>) -> Result<Vec<T>> {
    if t.kind != TransformKind::Pca {
        return Err(Error::invalid("explained variance is defined for PCA only"));
    }
    if t.total == T::zero() {
        return Ok(vec![T::zero(); t.values.len()]);
    }
    Ok(t.values.iter().map(|&v| v / t.total).collect())
}

pub fn pca_transform<T: Scalar>(t: &LinearTransform<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    t.transform(x)
}
