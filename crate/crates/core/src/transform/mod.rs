//! Linear projections of the feature space: PCA and LDA.

pub mod lda;
pub mod pca;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub use lda::{
    fisher_ratio, lda_classifier_fit, lda_fit, lda_predict, scatter_matrices, Covariance, LdaClassifier, LdaOptions,
};
pub use pca::{explained_variance_ratio, pca_fit, pca_transform, Components};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Pca,
    Lda,
}

/// `x ↦ (x − column_means)·W` with `W` of shape `p × k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTransform<T> {
    pub kind: TransformKind,
    pub column_means: Vec<T>,
    pub w: Matrix<T>,
    /// PCA: covariance eigenvalues; LDA: generalized eigenvalues of the
    /// between- vs within-class scatter. One per kept component.
    pub values: Vec<T>,
    /// Sum of all eigenvalues, kept or not.
    pub total: T,
}

impl<T: Scalar> LinearTransform<T> {
    pub fn input_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        let p = self.input_dim();
        if x.cols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: x.cols(),
            });
        }
        let k = self.output_dim();
        let mut out = vec![T::zero(); x.rows() * k];
        out.par_chunks_mut(k.max(1)).enumerate().for_each(|(i, o)| {
            let r = x.row(i);
            for (j, oj) in o.iter_mut().enumerate() {
                *oj = (0..p).map(|f| (r[f] - self.column_means[f]) * self.w[(f, j)]).sum();
            }
        });
        Matrix::from_vec(x.rows(), k, out)
    }

    pub fn transform_row(&self, row: &[T]) -> Result<Vec<T>> {
        let m = Matrix::from_vec(1, row.len(), row.to_vec())?;
        Ok(self.transform(&m)?.row(0).to_vec())
    }
}
