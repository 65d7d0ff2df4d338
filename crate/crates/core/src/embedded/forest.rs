//! Random forest with bagging, random subspaces and out-of-bag permutation
//! importance.
//!
//! Tree `t` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `t`, so a
//! tree's bag and splits depend only on `(seed, t)` and not on the thread
//! schedule.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Criterion, Subspace, TreeConfig, TreeModel};
use crate::classify::argmax_first;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::filters::FeatureRanking;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features considered per split; `None` is `floor(sqrt(p))`.
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    pub seed: u64,
    /// Draw bootstrap bags; when false every tree sees the full sample once.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            mtry: None,
            max_depth: None,
            criterion: Criterion::Gini,
            seed: 42,
            bootstrap: true,
        }
    }
}

impl ForestConfig {
    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or_else(|| ((p as f64).sqrt().floor() as usize).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel<T> {
    pub trees: Vec<TreeModel<T>>,
    /// `in_bag[t][i]`: sample `i` was drawn at least once for tree `t`.
    pub in_bag: Vec<Vec<bool>>,
    pub mtry: usize,
    pub n_trees: usize,
    pub seed: u64,
    pub n_classes: usize,
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

pub fn rf_fit<T: Scalar>(train: &Dataset<T>, config: &ForestConfig) -> Result<ForestModel<T>> {
    if config.n_trees == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    let n = train.n();
    let p = train.p();
    let mtry = config.resolved_mtry(p);
    if mtry == 0 || mtry > p {
        return Err(Error::invalid(format!("mtry = {mtry} outside 1..={p}")));
    }
    let tree_cfg = TreeConfig {
        criterion: config.criterion,
        max_depth: config.max_depth,
        min_samples_split: 2,
    };
    let fitted: Vec<(TreeModel<T>, Vec<bool>)> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(config.seed, t);
            let rows: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut mask = vec![false; n];
            for &i in &rows {
                mask[i] = true;
            }
            let sub = if mtry < p {
                Some(Subspace { mtry, rng: &mut rng })
            } else {
                None
            };
            grow(train, &rows, tree_cfg, sub).map(|tree| (tree, mask))
        })
        .collect::<Result<_>>()?;
    let (trees, in_bag) = fitted.into_iter().unzip();
    Ok(ForestModel {
        trees,
        in_bag,
        mtry,
        n_trees: config.n_trees,
        seed: config.seed,
        n_classes: train.n_classes(),
    })
}

impl<T: Scalar> ForestModel<T> {
    /// Mean fraction of samples left out of each tree's bag.
    pub fn mean_oob_fraction(&self) -> f64 {
        let per_tree: f64 = self
            .in_bag
            .iter()
            .map(|m| m.iter().filter(|&&b| !b).count() as f64 / m.len() as f64)
            .sum();
        per_tree / self.in_bag.len() as f64
    }

    /// Number of samples out of bag for at least one tree.
    pub fn oob_coverage(&self) -> usize {
        let n = self.in_bag.first().map_or(0, Vec::len);
        (0..n).filter(|&i| self.in_bag.iter().any(|m| !m[i])).count()
    }

    /// Majority vote over all trees; ties go to the smaller class id.
    pub fn predict_row(&self, row: &[T]) -> usize {
        let mut votes = vec![0; self.n_classes];
        for t in &self.trees {
            votes[t.predict_row(row)] += 1;
        }
        argmax_first(&votes)
    }
}

fn check_train<T: Scalar>(model: &ForestModel<T>, train: &Dataset<T>) -> Result<()> {
    let n = model.in_bag.first().map_or(0, Vec::len);
    if n != train.n() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: train.n(),
        });
    }
    if model.trees.first().is_some_and(|t| t.p != train.p()) {
        return Err(Error::DimensionMismatch {
            expected: model.trees[0].p,
            found: train.p(),
        });
    }
    Ok(())
}

/// Accuracy of the out-of-bag majority vote over samples that are out of bag
/// for at least one tree.
pub fn rf_oob_accuracy<T: Scalar>(model: &ForestModel<T>, train: &Dataset<T>) -> Result<f64> {
    check_train(model, train)?;
    let mut covered = 0usize;
    let mut correct = 0usize;
    for i in 0..train.n() {
        let mut votes = vec![0usize; model.n_classes];
        let mut any = false;
        for (t, mask) in model.trees.iter().zip(&model.in_bag) {
            if !mask[i] {
                votes[t.predict_row(train.x().row(i))] += 1;
                any = true;
            }
        }
        if any {
            covered += 1;
            if argmax_first(&votes) == train.y()[i] {
                correct += 1;
            }
        }
    }
    if covered == 0 {
        return Err(Error::InsufficientData(
            "no sample is out of bag for any tree; grow more trees".into(),
        ));
    }
    if covered < train.n() {
        log::warn!(
            "{} of {} samples never out of bag; excluded from OOB accuracy",
            train.n() - covered,
            train.n()
        );
    }
    Ok(correct as f64 / covered as f64)
}

/// Per-feature mean drop in per-tree OOB accuracy when the feature's OOB
/// values are shuffled, averaged over trees with a non-empty OOB set and over
/// `repeats` shuffles.
pub fn rf_permutation_importance<T: Scalar>(
    model: &ForestModel<T>,
    train: &Dataset<T>,
    repeats: usize,
    seed: u64,
) -> Result<FeatureRanking<T>> {
    if repeats == 0 {
        return Err(Error::invalid("permutation importance needs at least one repeat"));
    }
    check_train(model, train)?;
    let p = train.p();
    let x = train.x();
    let y = train.y();
    let per_tree: Vec<Option<Vec<f64>>> = model
        .trees
        .par_iter()
        .zip(&model.in_bag)
        .enumerate()
        .map(|(t, (tree, mask))| {
            let oob: Vec<usize> = (0..train.n()).filter(|&i| !mask[i]).collect();
            if oob.is_empty() {
                return None;
            }
            let m = oob.len() as f64;
            let hits = |rows: &mut dyn Iterator<Item = (usize, Vec<T>)>| {
                rows.filter(|(i, r)| tree.predict_row(r) == y[*i]).count() as f64
            };
            let base = hits(&mut oob.iter().map(|&i| (i, x.row(i).to_vec()))) / m;
            let mut rng = tree_rng(seed, t);
            let mut drop = vec![0.0; p];
            for (f, d) in drop.iter_mut().enumerate() {
                for _ in 0..repeats {
                    let mut perm = oob.clone();
                    perm.shuffle(&mut rng);
                    let acc = hits(&mut oob.iter().zip(&perm).map(|(&i, &j)| {
                        let mut r = x.row(i).to_vec();
                        r[f] = x[(j, f)];
                        (i, r)
                    })) / m;
                    *d += base - acc;
                }
                *d /= repeats as f64;
            }
            Some(drop)
        })
        .collect();
    let used: Vec<Vec<f64>> = per_tree.into_iter().flatten().collect();
    if used.is_empty() {
        return Err(Error::InsufficientData("no tree has out-of-bag samples".into()));
    }
    let mut scores = vec![0.0; p];
    for d in &used {
        for (s, v) in scores.iter_mut().zip(d) {
            *s += v;
        }
    }
    let k = used.len() as f64;
    let mut r = FeatureRanking::new("rf_importance", scores.into_iter().map(|s| T::real(s / k)).collect())?;
    r.seed = Some(seed);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedded::tree::{tree_fit, tree_selected_features};
    use crate::linalg::Matrix;

    fn noisy(n: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = Matrix::from_fn(n, 3, |i, j| match j {
            0 => y[i] as f64 * 3.0 + rng.gen::<f64>(),
            _ => rng.gen::<f64>(),
        });
        Dataset::from_parts(x, y).unwrap()
    }

    #[test]
    fn degenerate_forest_is_a_tree() {
        let d = noisy(50, 1);
        let cfg = ForestConfig {
            n_trees: 1,
            mtry: Some(3),
            bootstrap: false,
            ..Default::default()
        };
        let f = rf_fit(&d, &cfg).unwrap();
        assert_eq!(f.trees[0], tree_fit(&d, TreeConfig::default()).unwrap());
    }

    #[test]
    fn oob_fraction_and_determinism() {
        let d = noisy(300, 2);
        let cfg = ForestConfig {
            n_trees: 40,
            ..Default::default()
        };
        let a = rf_fit(&d, &cfg).unwrap();
        assert!((a.mean_oob_fraction() - 0.368).abs() < 0.02);
        let b = rf_fit(&d, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(rf_oob_accuracy(&a, &d).unwrap() > 0.95);
        assert!(rf_fit(
            &d,
            &ForestConfig {
                mtry: Some(4),
                ..cfg.clone()
            }
        )
        .is_err());
    }

    #[test]
    fn unused_feature_has_zero_importance() {
        let d = noisy(80, 3);
        let cfg = ForestConfig {
            n_trees: 20,
            max_depth: Some(1),
            mtry: Some(3),
            ..Default::default()
        };
        let f = rf_fit(&d, &cfg).unwrap();
        let used: std::collections::BTreeSet<usize> = f.trees.iter().flat_map(tree_selected_features).collect();
        let imp = rf_permutation_importance(&f, &d, 3, 7).unwrap();
        for j in 0..3 {
            if !used.contains(&j) {
                assert_eq!(imp.scores[j], 0.0);
            }
        }
        assert_eq!(imp.order[0], 0);
        assert!(rf_permutation_importance(&f, &d, 0, 7).is_err());
    }

    #[test]
    fn single_class_oob_is_perfect() {
        let x = Matrix::from_fn(30, 2, |i, j| (i * (j + 1)) as f64);
        let d = Dataset::from_parts(x, vec![0; 30]).unwrap();
        let f = rf_fit(
            &d,
            &ForestConfig {
                n_trees: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(rf_oob_accuracy(&f, &d).unwrap(), 1.0);
    }
}
