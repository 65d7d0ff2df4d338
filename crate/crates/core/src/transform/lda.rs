//! Linear discriminant analysis and the Gaussian classifier in LDA space.
//!
//! The Fisher criterion `|WᵀS_BW| / |WᵀS_WW|` is maximized by the leading
//! generalized eigenvectors of `(S_B, S_W)`. With `S_W = LLᵀ` the problem
//! becomes the symmetric eigenproblem of `L⁻¹S_BL⁻ᵀ`, whose eigenvectors `V`
//! map back to `W = L⁻ᵀV`. The returned `W` therefore satisfies
//! `WᵀS_WW = I`.

use serde::{Deserialize, Serialize};

use super::{LinearTransform, TransformKind};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, dot, invert_lower, normalize_signs, spd_inverse, symmetric_eigen, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LdaOptions {
    /// Weight each class's within-class scatter by its size `n_c`, as the
    /// within-class scatter formula is sometimes printed. Off by default.
    pub scale_within_by_class_size: bool,
    /// One covariance per class in the classifier instead of a pooled one.
    pub per_class_covariance: bool,
}

/// Between-class (`S_B`) and within-class (`S_W`) scatter matrices.
pub fn scatter_matrices<T: Scalar>(ds: &Dataset<T>, scale_within_by_class_size: bool) -> Result<(Matrix<T>, Matrix<T>)> {
    let counts = ds.class_counts();
    let present = counts.iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::InsufficientData(
            "LDA needs at least two classes; between-class scatter is zero".into(),
        ));
    }
    if let Some(c) = (0..counts.len()).find(|&c| counts[c] == 1) {
        return Err(Error::InsufficientData(format!(
            "class '{}' has a single sample; LDA needs at least 2 per class",
            ds.class_names()[c]
        )));
    }
    let p = ds.p();
    let mu = ds.x().column_means();
    let means = class_means(ds.x(), ds.y(), &counts);
    let mut sb = Matrix::zeros(p, p);
    for (c, m) in means.iter().enumerate() {
        if counts[c] == 0 {
            continue;
        }
        let d: Vec<T> = m.iter().zip(&mu).map(|(&a, &b)| a - b).collect();
        add_outer(&mut sb, &d, T::count(counts[c]));
    }
    let mut sw = Matrix::zeros(p, p);
    for (r, &c) in ds.x().row_iter().zip(ds.y()) {
        let d: Vec<T> = r.iter().zip(&means[c]).map(|(&a, &b)| a - b).collect();
        let w = if scale_within_by_class_size {
            T::count(counts[c])
        } else {
            T::one()
        };
        add_outer(&mut sw, &d, w);
    }
    Ok((sb, sw))
}

fn class_means<T: Scalar>(x: &Matrix<T>, y: &[usize], counts: &[usize]) -> Vec<Vec<T>> {
    let mut means = vec![vec![T::zero(); x.cols()]; counts.len()];
    for (r, &c) in x.row_iter().zip(y) {
        for (m, &v) in means[c].iter_mut().zip(r) {
            *m += v;
        }
    }
    for (m, &n) in means.iter_mut().zip(counts) {
        if n > 0 {
            m.iter_mut().for_each(|v| *v /= T::count(n));
        }
    }
    means
}

fn add_outer<T: Scalar>(m: &mut Matrix<T>, d: &[T], w: T) {
    for i in 0..d.len() {
        for j in 0..d.len() {
            m[(i, j)] += w * d[i] * d[j];
        }
    }
}

/// Cholesky factor, adding `εI` with `ε = 1e−6·trace/p` if the matrix is
/// singular.
fn ridge_cholesky<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    match cholesky(a) {
        Ok(l) => Ok(l),
        Err(Error::NotPositiveDefinite) => {
            let p = a.rows();
            let base = (a.trace() / T::count(p)).max(T::epsilon());
            let eps = T::real(1e-6) * base;
            log::warn!("singular scatter matrix; adding ridge {eps}");
            let mut r = a.clone();
            for i in 0..p {
                r[(i, i)] += eps;
            }
            cholesky(&r)
        }
        Err(e) => Err(e),
    }
}

/// Fisher criterion `|WᵀS_BW| / |WᵀS_WW|`.
pub fn fisher_ratio<T: Scalar>(sb: &Matrix<T>, sw: &Matrix<T>, w: &Matrix<T>) -> Result<T> {
    let wt = w.transpose();
    let num = wt.matmul(sb)?.matmul(w)?.determinant()?;
    let den = wt.matmul(sw)?.matmul(w)?.determinant()?;
    Ok(num / den)
}

/// Fits the projection; `k` defaults to `|C| − 1`.
pub fn lda_fit<T: Scalar>(ds: &Dataset<T>, k: Option<usize>, options: LdaOptions) -> Result<LinearTransform<T>> {
    let (sb, sw) = scatter_matrices(ds, options.scale_within_by_class_size)?;
    let p = ds.p();
    let classes = ds.class_counts().iter().filter(|&&c| c > 0).count();
    let k = k.unwrap_or((classes - 1).min(p));
    if k == 0 || k > p {
        return Err(Error::invalid(format!("k = {k} outside 1..={p}")));
    }
    if k > classes - 1 {
        log::warn!(
            "k = {k} exceeds |C| - 1 = {}; extra components carry no between-class scatter",
            classes - 1
        );
    }
    let l = ridge_cholesky(&sw)?;
    let li = invert_lower(&l);
    let m = li.matmul(&sb)?.matmul(&li.transpose())?;
    let eig = symmetric_eigen(&m)?;
    let v = Matrix::from_fn(p, k, |i, j| eig.vectors[(i, j)]);
    let mut w = li.transpose().matmul(&v)?;
    normalize_signs(&mut w);
    let values: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
    Ok(LinearTransform {
        kind: TransformKind::Lda,
        column_means: ds.x().column_means(),
        total: values.iter().copied().sum(),
        values: values[..k].to_vec(),
        w,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Covariance<T> {
    Pooled(Matrix<T>),
    PerClass(Vec<Matrix<T>>),
}

/// Gaussian class densities in LDA space with class priors.
#[derive(Debug, Clone)]
pub struct LdaClassifier<T> {
    pub transform: LinearTransform<T>,
    /// Per-class means in LDA space (empty for classes without samples).
    pub means: Vec<Vec<T>>,
    pub covariance: Covariance<T>,
    pub priors: Vec<f64>,
    /// `(log det Σ_c, Σ_c⁻¹)` per class.
    precision: Vec<Option<(T, Matrix<T>)>>,
}

impl<T: Scalar> LdaClassifier<T> {
    /// Replaces the class priors; they must be non-negative and sum to 1.
    pub fn with_priors(mut self, priors: Vec<f64>) -> Result<Self> {
        if priors.len() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: priors.len(),
            });
        }
        if priors.iter().any(|&p| p.is_nan() || p < 0.0) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("priors must be non-negative and sum to 1"));
        }
        self.priors = priors;
        Ok(self)
    }

    /// Log of `P(x | y = c)·P(y = c)` up to a shared constant.
    pub fn log_scores(&self, z: &[T]) -> Vec<f64> {
        self.means
            .iter()
            .enumerate()
            .map(|(c, mu)| match &self.precision[c] {
                Some((log_det, inv)) if self.priors[c] > 0.0 => {
                    let d: Vec<T> = z.iter().zip(mu).map(|(&a, &b)| a - b).collect();
                    let q: T = (0..d.len()).map(|i| d[i] * dot(inv.row(i), &d)).sum();
                    -0.5 * (log_det.as_f64() + q.as_f64()) + self.priors[c].ln()
                }
                _ => f64::NEG_INFINITY,
            })
            .collect()
    }
}

fn regularized_precision<T: Scalar>(cov: &Matrix<T>) -> Result<(T, Matrix<T>)> {
    let l = ridge_cholesky(cov)?;
    let li = invert_lower(&l);
    let log_det = (0..l.rows()).map(|i| l[(i, i)].ln()).sum::<T>() * T::real(2.0);
    Ok((log_det, li.transpose().matmul(&li)?))
}

pub fn lda_classifier_fit<T: Scalar>(
    ds: &Dataset<T>,
    k: Option<usize>,
    options: LdaOptions,
) -> Result<LdaClassifier<T>> {
    let transform = lda_fit(ds, k, options)?;
    let z = transform.transform(ds.x())?;
    let counts = ds.class_counts();
    let kdim = transform.output_dim();
    let means = class_means(&z, ds.y(), &counts);
    let mut scatter = vec![Matrix::zeros(kdim, kdim); counts.len()];
    for (r, &c) in z.row_iter().zip(ds.y()) {
        let d: Vec<T> = r.iter().zip(&means[c]).map(|(&a, &b)| a - b).collect();
        add_outer(&mut scatter[c], &d, T::one());
    }
    let present: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] > 0).collect();
    let (covariance, precision) = if options.per_class_covariance {
        let covs: Vec<Matrix<T>> = (0..counts.len())
            .map(|c| scatter[c].map(|v| v / T::count(counts[c].max(2) - 1)))
            .collect();
        let prec = (0..counts.len())
            .map(|c| {
                if counts[c] > 0 {
                    regularized_precision(&covs[c]).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        (Covariance::PerClass(covs), prec)
    } else {
        let mut pooled = Matrix::zeros(kdim, kdim);
        for &c in &present {
            for i in 0..kdim {
                for j in 0..kdim {
                    pooled[(i, j)] += scatter[c][(i, j)];
                }
            }
        }
        let dof = T::count(ds.n() - present.len());
        let pooled = pooled.map(|v| v / dof);
        let shared = spd_inverse(&pooled).or_else(|_| regularized_precision(&pooled))?;
        let prec = (0..counts.len())
            .map(|c| (counts[c] > 0).then(|| shared.clone()))
            .collect();
        (Covariance::Pooled(pooled), prec)
    };
    let priors = counts.iter().map(|&c| c as f64 / ds.n() as f64).collect();
    Ok(LdaClassifier {
        transform,
        means,
        covariance,
        priors,
        precision,
    })
}

/// Most probable class; ties go to the smaller class id.
pub fn lda_predict<T: Scalar>(clf: &LdaClassifier<T>, queries: &Matrix<T>) -> Result<Vec<usize>> {
    let z = clf.transform.transform(queries)?;
    Ok(z.row_iter()
        .map(|r| {
            let s = clf.log_scores(r);
            let mut best = 0;
            for c in 1..s.len() {
                if s[c] > s[best] {
                    best = c;
                }
            }
            best
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Two classes separated along (1, 1)/√2 with isotropic noise.
    fn diagonal_classes(n: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = Matrix::from_fn(n, 2, |i, _| y[i] as f64 * 4.0 + rng.gen::<f64>() - 0.5);
        Dataset::from_parts(x, y).unwrap()
    }

    #[test]
    fn first_discriminant_follows_separation() {
        // Separation along x only; y is pure noise.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<usize> = (0..200).map(|i| i % 2).collect();
        let x = Matrix::from_fn(
            200,
            2,
            |i, j| if j == 0 { y[i] as f64 * 3.0 } else { 0.0 } + rng.gen::<f64>(),
        );
        let ds = Dataset::from_parts(x, y).unwrap();
        let t = lda_fit(&ds, None, LdaOptions::default()).unwrap();
        assert_eq!(t.output_dim(), 1);
        let w = t.w.column(0);
        let cos = w[0].abs() / (w[0] * w[0] + w[1] * w[1]).sqrt();
        assert!(cos > 0.99, "cos = {cos}");
    }

    #[test]
    fn whitened_scatter_is_identity() {
        let ds = diagonal_classes(100, 1);
        let (_, sw) = scatter_matrices(&ds, false).unwrap();
        let t = lda_fit(&ds, Some(2), LdaOptions::default()).unwrap();
        let g = t.w.transpose().matmul(&sw).unwrap().matmul(&t.w).unwrap();
        assert!(g.max_abs_diff(&Matrix::identity(2)) < 1e-8);
    }

    #[test]
    fn classifier_basics() {
        let ds = diagonal_classes(100, 2);
        let clf = lda_classifier_fit(&ds, None, LdaOptions::default()).unwrap();
        let mean0 = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let mean1 = Matrix::from_rows(&[[4.0, 4.0]]).unwrap();
        assert_eq!(lda_predict(&clf, &mean0).unwrap(), vec![0]);
        assert_eq!(lda_predict(&clf, &mean1).unwrap(), vec![1]);
        let acc = lda_predict(&clf, ds.x())
            .unwrap()
            .iter()
            .zip(ds.y())
            .filter(|(a, b)| a == b)
            .count();
        assert_eq!(acc, 100);
        let mid = Matrix::from_rows(&[[1.8, 1.8], [2.2, 2.2]]).unwrap();
        let biased = clf.clone().with_priors(vec![1.0 - 1e-12, 1e-12]).unwrap();
        assert_eq!(lda_predict(&biased, &mid).unwrap(), vec![0, 0]);
        assert!(clf.clone().with_priors(vec![0.7, 0.7]).is_err());
        let per = lda_classifier_fit(
            &ds,
            None,
            LdaOptions {
                per_class_covariance: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(lda_predict(&per, &mean1).unwrap(), vec![1]);
    }

    #[test]
    fn degenerate_inputs() {
        let x = Matrix::from_fn(5, 2, |i, j| (i + j) as f64);
        let single = Dataset::from_parts(x.clone(), vec![0; 5]).unwrap();
        assert!(lda_fit(&single, None, LdaOptions::default()).is_err());
        let lonely = Dataset::from_parts(x, vec![0, 0, 0, 0, 1]).unwrap();
        assert!(lda_fit(&lonely, None, LdaOptions::default()).is_err());
    }

    #[test]
    fn singular_within_scatter_is_ridged() {
        // Second feature duplicates the first.
        let x = Matrix::from_fn(8, 2, |i, _| (i % 4) as f64 + if i < 4 { 0.0 } else { 10.0 });
        let ds = Dataset::from_parts(x, (0..8).map(|i| usize::from(i >= 4)).collect()).unwrap();
        let t = lda_fit(&ds, None, LdaOptions::default()).unwrap();
        assert!(t.w.as_slice().iter().all(|v| v.is_finite()));
    }
}
