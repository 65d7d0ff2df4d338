//! k-nearest-neighbour classifier, accuracy harness and the
//! curse-of-dimensionality demonstrations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FoldAssignment, Standardizer};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Cosine,
}

/// Classifier settings shared by every evaluation in the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: Metric,
    /// Z-score features with statistics of the training data.
    pub standardize: bool,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 3,
            metric: Metric::Euclidean,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnnModel<T> {
    config: KnnConfig,
    standardizer: Option<Standardizer<T>>,
    train: Matrix<T>,
    labels: Vec<usize>,
    n_classes: usize,
}

pub fn knn_fit<T: Scalar>(train: &Dataset<T>, config: KnnConfig) -> Result<KnnModel<T>> {
    if config.k == 0 || config.k > train.n() {
        return Err(Error::invalid(format!("k = {} outside 1..={}", config.k, train.n())));
    }
    let (standardizer, x) = if config.standardize {
        let s = Standardizer::fit(train.x());
        let x = s.transform(train.x())?;
        (Some(s), x)
    } else {
        (None, train.x().clone())
    };
    Ok(KnnModel {
        config,
        standardizer,
        train: x,
        labels: train.y().to_vec(),
        n_classes: train.n_classes(),
    })
}

impl<T: Scalar> KnnModel<T> {
    pub fn config(&self) -> KnnConfig {
        self.config
    }

    /// Majority vote of the `k` nearest training points. Distance ties go to
    /// the lower training index, vote ties to the smaller class id.
    pub fn predict(&self, queries: &Matrix<T>) -> Result<Vec<usize>> {
        if queries.cols() != self.train.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.train.cols(),
                found: queries.cols(),
            });
        }
        let train_norms: Option<Vec<T>> =
            (self.config.metric == Metric::Cosine).then(|| self.train.row_iter().map(norm).collect());
        let mut q = vec![T::zero(); queries.cols()];
        let mut dists: Vec<(T, usize)> = Vec::with_capacity(self.train.rows());
        let mut votes = vec![0usize; self.n_classes];
        let mut out = Vec::with_capacity(queries.rows());
        for row in queries.row_iter() {
            q.copy_from_slice(row);
            if let Some(s) = &self.standardizer {
                s.transform_row_in_place(&mut q);
            }
            dists.clear();
            match &train_norms {
                None => dists.extend(
                    self.train
                        .row_iter()
                        .enumerate()
                        .map(|(i, t)| (squared_euclidean(&q, t), i)),
                ),
                Some(norms) => {
                    let qn = norm(&q);
                    dists.extend(
                        self.train
                            .row_iter()
                            .enumerate()
                            .map(|(i, t)| (T::one() - cosine_with_norms(&q, t, qn, norms[i]), i)),
                    )
                }
            }
            let k = self.config.k;
            let by_dist = |a: &(T, usize), b: &(T, usize)| total_cmp(&a.0, &b.0).then(a.1.cmp(&b.1));
            if k < dists.len() {
                dists.select_nth_unstable_by(k - 1, by_dist);
            }
            votes.iter_mut().for_each(|v| *v = 0);
            for &(_, i) in &dists[..k] {
                votes[self.labels[i]] += 1;
            }
            out.push(argmax_first(&votes));
        }
        Ok(out)
    }
}

pub fn knn_predict<T: Scalar>(model: &KnnModel<T>, queries: &Matrix<T>) -> Result<Vec<usize>> {
    model.predict(queries)
}

/// Index of the largest count; the smallest index wins ties.
pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = c;
        }
    }
    best
}

#[inline]
fn squared_euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
fn norm<T: Scalar>(a: &[T]) -> T {
    a.iter().map(|&v| v * v).sum::<T>().sqrt()
}

#[inline]
fn cosine_with_norms<T: Scalar>(a: &[T], b: &[T], na: T, nb: T) -> T {
    if na == T::zero() || nb == T::zero() {
        return T::zero();
    }
    crate::linalg::dot(a, b) / (na * nb)
}

/// Cosine similarity; zero when either vector is zero.
pub fn cosine_similarity<T: Scalar>(a: &[T], b: &[T]) -> T {
    cosine_with_norms(a, b, norm(a), norm(b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Pooled accuracy, `trace(confusion) / sum(confusion)`.
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub fold_scores: Option<Vec<f64>>,
}

impl EvalReport {
    pub fn from_predictions(truth: &[usize], predicted: &[usize], n_classes: usize) -> Self {
        let mut confusion = vec![vec![0; n_classes]; n_classes];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t][p] += 1;
        }
        let correct: usize = (0..n_classes).map(|c| confusion[c][c]).sum();
        let total = truth.len().max(1);
        Self {
            accuracy: correct as f64 / total as f64,
            confusion,
            fold_scores: None,
        }
    }

    /// Cross-validated accuracy: the mean per-fold accuracy when fold scores
    /// are present, otherwise the pooled accuracy.
    pub fn cv_accuracy(&self) -> f64 {
        match &self.fold_scores {
            Some(s) if !s.is_empty() => s.iter().sum::<f64>() / s.len() as f64,
            _ => self.accuracy,
        }
    }
}

/// Fits on `train` and scores on `test`.
pub fn holdout_accuracy<T: Scalar>(train: &Dataset<T>, test: &Dataset<T>, config: KnnConfig) -> Result<EvalReport> {
    let model = knn_fit(train, config)?;
    let pred = model.predict(test.x())?;
    Ok(EvalReport::from_predictions(test.y(), &pred, train.n_classes()))
}

/// k-fold cross-validation; folds are evaluated in parallel and aggregated by
/// fold id.
pub fn cross_val_accuracy<T: Scalar>(ds: &Dataset<T>, folds: &FoldAssignment, config: KnnConfig) -> Result<EvalReport> {
    if folds.fold_of.len() != ds.n() {
        return Err(Error::DimensionMismatch {
            expected: ds.n(),
            found: folds.fold_of.len(),
        });
    }
    let per_fold: Vec<Result<(Vec<usize>, Vec<usize>)>> = (0..folds.k)
        .into_par_iter()
        .map(|f| {
            let (train_idx, test_idx) = folds.fold_indices(f);
            if test_idx.is_empty() {
                return Err(Error::invalid(format!("fold {f} is empty")));
            }
            let train = ds.select_rows(&train_idx)?;
            let model = knn_fit(&train, config)?;
            let pred = model.predict(&ds.x().select_rows(&test_idx))?;
            Ok((test_idx, pred))
        })
        .collect();

    let mut truth = Vec::with_capacity(ds.n());
    let mut predicted = Vec::with_capacity(ds.n());
    let mut fold_scores = Vec::with_capacity(folds.k);
    for r in per_fold {
        let (test_idx, pred) = r?;
        let correct = test_idx.iter().zip(&pred).filter(|(&i, &p)| ds.y()[i] == p).count();
        fold_scores.push(correct as f64 / test_idx.len() as f64);
        truth.extend(test_idx.iter().map(|&i| ds.y()[i]));
        predicted.extend(pred);
    }
    let mut report = EvalReport::from_predictions(&truth, &predicted, ds.n_classes());
    report.fold_scores = Some(fold_scores);
    Ok(report)
}

/// Five-number summary of cosine similarities to a probe in one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySpread {
    pub dim: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl SimilaritySpread {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Cosine similarity between a random probe and `n_points` uniform random
/// points in the unit hypercube, summarised per dimension.
pub fn similarity_spread_demo<T: Scalar>(dims: &[usize], n_points: usize, seed: u64) -> Result<Vec<SimilaritySpread>> {
    if dims.is_empty() {
        return Err(Error::invalid("dimension list is empty"));
    }
    if dims.contains(&0) {
        return Err(Error::invalid("dimensions must be >= 1"));
    }
    if n_points < 10 {
        return Err(Error::invalid(format!("n_points = {n_points} < 10")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(dims.len());
    for &d in dims {
        let probe: Vec<T> = (0..d).map(|_| T::real(rng.gen::<f64>())).collect();
        let mut sims: Vec<f64> = (0..n_points)
            .map(|_| {
                let pt: Vec<T> = (0..d).map(|_| T::real(rng.gen::<f64>())).collect();
                cosine_similarity(&probe, &pt).as_f64()
            })
            .collect();
        sims.sort_by(f64::total_cmp);
        out.push(SimilaritySpread {
            dim: d,
            min: sims[0],
            q1: quantile_sorted(&sims, 0.25),
            median: quantile_sorted(&sims, 0.5),
            q3: quantile_sorted(&sims, 0.75),
            max: sims[sims.len() - 1],
        });
    }
    Ok(out)
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Uniform random point clouds, one `n_points × dim` matrix per dimension.
pub fn sparsity_demo<T: Scalar>(dims: &[usize], n_points: usize, seed: u64) -> Result<Vec<Matrix<T>>> {
    if dims.is_empty() {
        return Err(Error::invalid("dimension list is empty"));
    }
    if dims.contains(&0) {
        return Err(Error::invalid("dimensions must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(dims
        .iter()
        .map(|&d| Matrix::from_fn(n_points, d, |_, _| T::real(rng.gen::<f64>())))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Dataset<f64> {
        let x = Matrix::from_fn(n, 2, |i, j| (i as f64) * (j as f64 + 1.0) + (i % 3) as f64);
        Dataset::from_parts(x, (0..n).map(|i| (i * 7) % 3).collect()).unwrap()
    }

    #[test]
    fn one_nn_recovers_training_labels() {
        let ds = grid(10);
        let m = knn_fit(
            &ds,
            KnnConfig {
                k: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.predict(ds.x()).unwrap(), ds.y());
    }

    #[test]
    fn k_equals_n_predicts_majority() {
        let x = Matrix::from_fn(5, 1, |i, _| i as f64);
        let ds = Dataset::from_parts(x, vec![1, 0, 1, 1, 0]).unwrap();
        let m = knn_fit(
            &ds,
            KnnConfig {
                k: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.predict(ds.x()).unwrap(), vec![1; 5]);
        assert!(knn_fit(
            &ds,
            KnnConfig {
                k: 6,
                ..Default::default()
            }
        )
        .is_err());
        assert!(knn_fit(
            &ds,
            KnnConfig {
                k: 0,
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn distance_tie_goes_to_lower_index() {
        let x = Matrix::from_rows(&[[1.0], [-1.0]]).unwrap();
        let ds = Dataset::from_parts(x, vec![1, 0]).unwrap();
        let cfg = KnnConfig {
            k: 1,
            standardize: false,
            ..Default::default()
        };
        let m = knn_fit(&ds, cfg).unwrap();
        assert_eq!(m.predict(&Matrix::from_rows(&[[0.0]]).unwrap()).unwrap(), vec![1]);
    }

    #[test]
    fn majority_vote_and_vote_tie() {
        let x = Matrix::from_rows(&[[0.0], [0.1], [0.2], [5.0]]).unwrap();
        let ds = Dataset::from_parts(x, vec![0, 0, 1, 1]).unwrap();
        let cfg = KnnConfig {
            k: 3,
            standardize: false,
            ..Default::default()
        };
        let m = knn_fit(&ds, cfg).unwrap();
        assert_eq!(m.predict(&Matrix::from_rows(&[[0.0]]).unwrap()).unwrap(), vec![0]);
        let cfg = KnnConfig {
            k: 2,
            standardize: false,
            ..Default::default()
        };
        let m = knn_fit(&ds, cfg).unwrap();
        // Neighbours 1 (class 0) and 2 (class 1) tie; smaller class wins.
        assert_eq!(m.predict(&Matrix::from_rows(&[[0.15]]).unwrap()).unwrap(), vec![0]);
    }

    #[test]
    fn dimension_mismatch() {
        let ds = grid(6);
        let m = knn_fit(&ds, KnnConfig::default()).unwrap();
        assert!(matches!(
            m.predict(&Matrix::zeros(1, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cosine_metric_uses_direction() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let ds = Dataset::from_parts(x, vec![0, 1]).unwrap();
        let cfg = KnnConfig {
            k: 1,
            metric: Metric::Cosine,
            standardize: false,
        };
        let m = knn_fit(&ds, cfg).unwrap();
        let q = Matrix::from_rows(&[[10.0, 1.0], [0.1, 3.0]]).unwrap();
        assert_eq!(m.predict(&q).unwrap(), vec![0, 1]);
    }

    #[test]
    fn cv_report_consistency() {
        let ds = grid(23);
        let folds = crate::data::kfold(&ds, 5, 1, false).unwrap();
        let r = cross_val_accuracy(&ds, &folds, KnnConfig::default()).unwrap();
        let total: usize = r.confusion.iter().flatten().sum();
        let trace: usize = (0..3).map(|c| r.confusion[c][c]).sum();
        assert_eq!(total, 23);
        assert_eq!(r.accuracy, trace as f64 / 23.0);
        let fs = r.fold_scores.as_ref().unwrap();
        assert!((r.cv_accuracy() - fs.iter().sum::<f64>() / 5.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_similarities_are_one() {
        let s = similarity_spread_demo::<f64>(&[1], 50, 3).unwrap();
        assert_eq!(s[0].min, 1.0);
        assert_eq!(s[0].max, 1.0);
    }

    #[test]
    fn demo_argument_validation() {
        assert!(similarity_spread_demo::<f64>(&[], 100, 1).is_err());
        assert!(similarity_spread_demo::<f64>(&[2], 5, 1).is_err());
        assert!(sparsity_demo::<f64>(&[0], 5, 1).is_err());
        let empty = sparsity_demo::<f64>(&[1, 2], 0, 1).unwrap();
        assert_eq!(empty[1].rows(), 0);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert_eq!(quantile_sorted(&v, 0.25), 1.75);
    }
}
