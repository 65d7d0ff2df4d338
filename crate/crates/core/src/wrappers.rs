//! Wrapper subset search: every candidate subset is scored by the
//! cross-validated accuracy of the k-NN classifier trained on it.
//!
//! Candidates within one search step are evaluated in parallel; the winner is
//! chosen by (accuracy, tie rule) and never by completion order, so traces are
//! reproducible for a fixed fold assignment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{cross_val_accuracy, KnnConfig};
use crate::data::{Dataset, FoldAssignment};
use crate::error::{Error, Result};
use crate::filters::FeatureRanking;
use crate::scalar::Scalar;

/// Refuses exhaustive search beyond this many features by default.
pub const DEFAULT_EXHAUSTIVE_MAX_P: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Sorted feature indices.
    pub subset: Vec<usize>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldsMeta {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl From<&FoldAssignment> for FoldsMeta {
    fn from(f: &FoldAssignment) -> Self {
        Self {
            k: f.k,
            seed: f.seed,
            stratified: f.stratified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetResult {
    /// Sorted selected feature indices.
    pub selected: Vec<usize>,
    pub trace: Vec<TraceStep>,
    pub stopping_rule: String,
    pub classifier: Option<KnnConfig>,
    pub folds: Option<FoldsMeta>,
}

impl SubsetResult {
    /// Score recorded for the selected subset.
    pub fn selected_score(&self) -> Option<f64> {
        self.trace.iter().find(|s| s.subset == self.selected).map(|s| s.score)
    }

    pub fn best_traced_score(&self) -> f64 {
        self.trace.iter().map(|s| s.score).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Cross-validated accuracy using only the columns in `subset`.
pub fn evaluate_subset<T: Scalar>(
    ds: &Dataset<T>,
    subset: &[usize],
    folds: &FoldAssignment,
    config: KnnConfig,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let sub = ds.select_features(subset)?;
    Ok(cross_val_accuracy(&sub, folds, config)?.cv_accuracy())
}

fn evaluate_all<T: Scalar>(
    ds: &Dataset<T>,
    candidates: Vec<Vec<usize>>,
    folds: &FoldAssignment,
    config: KnnConfig,
) -> Result<Vec<TraceStep>> {
    candidates
        .into_par_iter()
        .map(|subset| {
            let score = evaluate_subset(ds, &subset, folds, config)?;
            Ok(TraceStep { subset, score })
        })
        .collect()
}

/// Highest score; ties go to the smaller subset, then the lexicographically
/// smaller one.
fn best_of(steps: &[TraceStep]) -> &TraceStep {
    steps
        .iter()
        .reduce(|best, s| {
            let better = s.score > best.score
                || (s.score == best.score && (s.subset.len(), &s.subset) < (best.subset.len(), &best.subset));
            if better {
                s
            } else {
                best
            }
        })
        .expect("non-empty trace")
}

fn result(
    selected: Vec<usize>,
    trace: Vec<TraceStep>,
    rule: &str,
    config: KnnConfig,
    folds: &FoldAssignment,
) -> SubsetResult {
    SubsetResult {
        selected,
        trace,
        stopping_rule: rule.to_string(),
        classifier: Some(config),
        folds: Some(folds.into()),
    }
}

/// Evaluates all `2^p − 1` non-empty subsets, enumerated by size and then
/// lexicographically.
pub fn exhaustive_search<T: Scalar>(
    ds: &Dataset<T>,
    folds: &FoldAssignment,
    config: KnnConfig,
    max_p: usize,
) -> Result<SubsetResult> {
    let p = ds.p();
    if p > max_p {
        return Err(Error::invalid(format!(
            "exhaustive search over p = {p} features exceeds the limit of {max_p}"
        )));
    }
    let mut candidates: Vec<Vec<usize>> = (1u64..(1u64 << p))
        .map(|mask| (0..p).filter(|&f| mask >> f & 1 == 1).collect())
        .collect();
    candidates.sort_by(|a: &Vec<usize>, b| (a.len(), a).cmp(&(b.len(), b)));
    let trace = evaluate_all(ds, candidates, folds, config)?;
    let selected = best_of(&trace).subset.clone();
    Ok(result(selected, trace, "exhaustive", config, folds))
}

/// Sequential forward selection.
///
/// Each step adds the single feature giving the highest accuracy (ties: lower
/// feature index). With `run_to_completion` every size is traced and the best
/// traced subset is returned; otherwise the search stops at the first step that
/// does not strictly improve accuracy.
pub fn sfs<T: Scalar>(
    ds: &Dataset<T>,
    folds: &FoldAssignment,
    config: KnnConfig,
    run_to_completion: bool,
) -> Result<SubsetResult> {
    let p = ds.p();
    let mut current: Vec<usize> = Vec::new();
    let mut trace: Vec<TraceStep> = Vec::with_capacity(p);
    while current.len() < p {
        let candidates: Vec<Vec<usize>> = (0..p)
            .filter(|f| !current.contains(f))
            .map(|f| {
                let mut s = current.clone();
                s.push(f);
                s.sort_unstable();
                s
            })
            .collect();
        let added: Vec<usize> = (0..p).filter(|f| !current.contains(f)).collect();
        let steps = evaluate_all(ds, candidates, folds, config)?;
        let mut win = 0;
        for (i, s) in steps.iter().enumerate() {
            if s.score > steps[win].score {
                win = i;
            }
        }
        let step = steps[win].clone();
        if !run_to_completion {
            if let Some(prev) = trace.last() {
                if step.score <= prev.score {
                    break;
                }
            }
        }
        current.push(added[win]);
        current.sort_unstable();
        trace.push(step);
    }
    let (selected, rule) = if run_to_completion {
        (best_of(&trace).subset.clone(), "run_to_completion")
    } else {
        (current, "first_non_improving")
    };
    Ok(result(selected, trace, rule, config, folds))
}

/// Backward elimination.
///
/// Starts from all features and repeatedly drops the feature whose removal
/// gives the highest accuracy (ties: drop the higher feature index). The first
/// trace entry is the full set. Without `run_to_completion` the search stops
/// once the best deletion loses accuracy.
pub fn backward_elimination<T: Scalar>(
    ds: &Dataset<T>,
    folds: &FoldAssignment,
    config: KnnConfig,
    run_to_completion: bool,
) -> Result<SubsetResult> {
    let p = ds.p();
    if p < 2 {
        return Err(Error::invalid("backward elimination needs at least 2 features"));
    }
    let mut current: Vec<usize> = (0..p).collect();
    let full = evaluate_subset(ds, &current, folds, config)?;
    let mut trace = vec![TraceStep {
        subset: current.clone(),
        score: full,
    }];
    while current.len() > 1 {
        // Candidates ordered by dropped feature, highest index first, so the
        // first maximum wins the tie rule.
        let dropped: Vec<usize> = current.iter().rev().copied().collect();
        let candidates: Vec<Vec<usize>> = dropped
            .iter()
            .map(|&d| current.iter().copied().filter(|&f| f != d).collect())
            .collect();
        let steps = evaluate_all(ds, candidates, folds, config)?;
        let mut win = 0;
        for (i, s) in steps.iter().enumerate() {
            if s.score > steps[win].score {
                win = i;
            }
        }
        let step = steps[win].clone();
        if !run_to_completion && step.score < trace.last().map_or(f64::NEG_INFINITY, |s| s.score) {
            break;
        }
        current = step.subset.clone();
        trace.push(step);
    }
    let (selected, rule) = if run_to_completion {
        (best_of(&trace).subset.clone(), "run_to_completion")
    } else {
        (current, "first_non_improving")
    };
    Ok(result(selected, trace, rule, config, folds))
}

/// Filter ranking followed by a wrapper over its nested prefixes: the smallest
/// prefix reaching the highest cross-validated accuracy is selected.
pub fn hybrid_filter_wrapper<T: Scalar>(
    ds: &Dataset<T>,
    ranking: &FeatureRanking<T>,
    folds: &FoldAssignment,
    config: KnnConfig,
) -> Result<SubsetResult> {
    if ranking.p() != ds.p() {
        return Err(Error::DimensionMismatch {
            expected: ds.p(),
            found: ranking.p(),
        });
    }
    let prefixes: Vec<Vec<usize>> = (1..=ds.p())
        .map(|k| {
            let mut s = ranking.order[..k].to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let trace = evaluate_all(ds, prefixes, folds, config)?;
    let mut win = 0;
    for (i, s) in trace.iter().enumerate() {
        if s.score > trace[win].score {
            win = i;
        }
    }
    let selected = trace[win].subset.clone();
    Ok(result(selected, trace, "hybrid_best_prefix", config, folds))
}

/// Prefix length of the hybrid selection.
pub fn hybrid_prefix_len(r: &SubsetResult) -> usize {
    r.selected.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::kfold;
    use crate::linalg::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Feature 0 determines the class; the others are noise.
    fn signal_plus_noise(n: usize, noise: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = Matrix::from_fn(n, noise + 1, |i, j| {
            if j == 0 {
                y[i] as f64 * 10.0 + rng.gen::<f64>()
            } else {
                rng.gen::<f64>() * 10.0
            }
        });
        Dataset::from_parts(x, y).unwrap()
    }

    #[test]
    fn exhaustive_counts_and_limit() {
        let ds = signal_plus_noise(40, 2, 1);
        let folds = kfold(&ds, 5, 1, true).unwrap();
        let r = exhaustive_search(&ds, &folds, KnnConfig::default(), 20).unwrap();
        assert_eq!(r.trace.len(), 7);
        assert_eq!(r.selected, vec![0]);
        assert!(exhaustive_search(&ds, &folds, KnnConfig::default(), 2).is_err());
    }

    #[test]
    fn sfs_picks_signal_first() {
        let ds = signal_plus_noise(40, 3, 2);
        let folds = kfold(&ds, 5, 1, true).unwrap();
        let r = sfs(&ds, &folds, KnnConfig::default(), true).unwrap();
        assert_eq!(r.trace.len(), 4);
        assert_eq!(r.trace[0].subset, vec![0]);
        for w in r.trace.windows(2) {
            assert_eq!(w[1].subset.len(), w[0].subset.len() + 1);
        }
        let r = sfs(&ds, &folds, KnnConfig::default(), false).unwrap();
        assert_eq!(r.selected, vec![0]);
    }

    #[test]
    fn be_shrinks_and_drops_noise() {
        let ds = signal_plus_noise(40, 2, 3);
        let folds = kfold(&ds, 5, 1, true).unwrap();
        let r = backward_elimination(&ds, &folds, KnnConfig::default(), true).unwrap();
        assert_eq!(r.trace.len(), 3);
        for w in r.trace.windows(2) {
            assert_eq!(w[1].subset.len() + 1, w[0].subset.len());
        }
        assert!(r.selected.contains(&0));
        let one = signal_plus_noise(10, 0, 1);
        assert!(backward_elimination(&one, &kfold(&one, 2, 0, false).unwrap(), KnnConfig::default(), true).is_err());
    }

    #[test]
    fn hybrid_selects_smallest_best_prefix() {
        let ds = signal_plus_noise(40, 3, 4);
        let folds = kfold(&ds, 5, 1, true).unwrap();
        let ranking = FeatureRanking::new("t", vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        let r = hybrid_filter_wrapper(&ds, &ranking, &folds, KnnConfig::default()).unwrap();
        assert_eq!(r.trace.len(), 4);
        assert_eq!(r.selected, vec![0]);
        let short = FeatureRanking::new("t", vec![1.0, 2.0]).unwrap();
        assert!(hybrid_filter_wrapper(&ds, &short, &folds, KnnConfig::default()).is_err());
    }

    #[test]
    fn empty_subset_rejected() {
        let ds = signal_plus_noise(20, 1, 5);
        let folds = kfold(&ds, 4, 1, false).unwrap();
        assert!(matches!(
            evaluate_subset(&ds, &[], &folds, KnnConfig::default()),
            Err(Error::EmptySubset)
        ));
    }
}
