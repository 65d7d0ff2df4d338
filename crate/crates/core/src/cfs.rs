//! Correlation-based feature selection.
//!
//! Feature–class and feature–feature correlations are symmetrical
//! uncertainties over binned features. A subset's merit is
//! `k·r̄cf / sqrt(k + k(k−1)·r̄ff)`, which rewards relevance and penalises
//! redundancy; subsets are explored best-first by single-feature additions.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DiscretizedView;
use crate::error::{Error, Result};
use crate::filters::entropy_of_counts;
use crate::scalar::Scalar;
use crate::wrappers::{SubsetResult, TraceStep};

/// Pairwise feature correlations are computed up front only for this many
/// features or fewer; larger problems fill the cache on demand.
pub const EAGER_PAIRS_LIMIT: usize = 64;

/// `2·IG(a; b) / (H(a) + H(b))`, zero when both entropies are zero.
pub fn symmetrical_uncertainty<T: Scalar>(a: &[usize], b: &[usize]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let ka = a.iter().copied().max().map_or(0, |m| m + 1);
    let kb = b.iter().copied().max().map_or(0, |m| m + 1);
    let mut ca = vec![0; ka];
    let mut cb = vec![0; kb];
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&u, &v) in a.iter().zip(b) {
        ca[u] += 1;
        cb[v] += 1;
        *joint.entry((u, v)).or_insert(0) += 1;
    }
    let ha: T = entropy_of_counts(&ca);
    let hb: T = entropy_of_counts(&cb);
    let denom = ha + hb;
    if denom <= T::zero() {
        return Ok(T::zero());
    }
    let mut jc: Vec<usize> = joint.into_values().collect();
    jc.sort_unstable();
    let hab: T = entropy_of_counts(&jc);
    let su = T::real(2.0) * (ha + hb - hab) / denom;
    Ok(su.max(T::zero()).min(T::one()))
}

/// Feature–class correlations and a lazily filled feature–feature matrix.
#[derive(Debug)]
pub struct CorrelationCache<'a, T> {
    r_cf: Vec<T>,
    pairs: Vec<OnceLock<T>>,
    columns: Vec<&'a [usize]>,
}

impl<'a, T: Scalar> CorrelationCache<'a, T> {
    pub fn new(dv: &'a DiscretizedView<T>, y: &[usize]) -> Result<Self> {
        if y.len() != dv.n() {
            return Err(Error::DimensionMismatch {
                expected: dv.n(),
                found: y.len(),
            });
        }
        let p = dv.p();
        let columns: Vec<&[usize]> = (0..p).map(|f| dv.column(f)).collect();
        let r_cf = columns
            .par_iter()
            .map(|c| symmetrical_uncertainty(c, y))
            .collect::<Result<Vec<T>>>()?;
        let cache = Self {
            r_cf,
            pairs: (0..p * p.saturating_sub(1) / 2).map(|_| OnceLock::new()).collect(),
            columns,
        };
        if p <= EAGER_PAIRS_LIMIT {
            (0..p).into_par_iter().for_each(|a| {
                for b in a + 1..p {
                    cache.r_ff(a, b);
                }
            });
        }
        Ok(cache)
    }

    /// Builds a cache from given correlations (diagonal of `r_ff` ignored).
    pub fn from_values(r_cf: Vec<T>, r_ff: &[Vec<T>]) -> Result<Self> {
        let p = r_cf.len();
        if r_ff.len() != p || r_ff.iter().any(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: r_ff.len(),
            });
        }
        let pairs: Vec<OnceLock<T>> = (0..p * p.saturating_sub(1) / 2).map(|_| OnceLock::new()).collect();
        for a in 0..p {
            for b in a + 1..p {
                let _ = pairs[pair_index(p, a, b)].set(r_ff[a][b]);
            }
        }
        Ok(Self {
            r_cf,
            pairs,
            columns: Vec::new(),
        })
    }

    pub fn p(&self) -> usize {
        self.r_cf.len()
    }

    pub fn r_cf(&self, f: usize) -> T {
        self.r_cf[f]
    }

    /// Symmetric feature–feature correlation; 1 on the diagonal.
    pub fn r_ff(&self, a: usize, b: usize) -> T {
        if a == b {
            return T::one();
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        *self.pairs[pair_index(self.p(), a, b)]
            .get_or_init(|| symmetrical_uncertainty(self.columns[a], self.columns[b]).unwrap_or(T::zero()))
    }
}

fn pair_index(p: usize, a: usize, b: usize) -> usize {
    // Row-major upper triangle without the diagonal.
    a * (2 * p - a - 1) / 2 + (b - a - 1)
}

/// CFS merit of a non-empty subset.
pub fn merit<T: Scalar>(subset: &[usize], cache: &CorrelationCache<'_, T>) -> Result<T> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(&bad) = subset.iter().find(|&&f| f >= cache.p()) {
        return Err(Error::invalid(format!("feature {bad} out of range")));
    }
    let k = T::count(subset.len());
    let rcf = subset.iter().map(|&f| cache.r_cf(f)).sum::<T>() / k;
    let mut rff = T::zero();
    let mut pairs = 0usize;
    for (i, &a) in subset.iter().enumerate() {
        for &b in &subset[i + 1..] {
            rff += cache.r_ff(a, b);
            pairs += 1;
        }
    }
    let rff = if pairs > 0 { rff / T::count(pairs) } else { T::zero() };
    Ok(k * rcf / (k + k * (k - T::one()) * rff).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeritTrace {
    /// Expanded subsets in expansion order, with their merits.
    pub steps: Vec<(Vec<usize>, f64)>,
    pub best_subset: Vec<usize>,
    pub best_merit: f64,
}

struct Open<T> {
    merit: T,
    subset: Vec<usize>,
}

impl<T: Scalar> PartialEq for Open<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Open<T> {}

impl<T: Scalar> PartialOrd for Open<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Open<T> {
    /// Max-heap order: higher merit first, then the lexicographically smaller
    /// subset.
    fn cmp(&self, other: &Self) -> Ordering {
        crate::scalar::total_cmp(&self.merit, &other.merit).then_with(|| other.subset.cmp(&self.subset))
    }
}

/// Best-first forward search over feature subsets scored by merit.
///
/// Every subset popped from the queue counts as one expansion; the search ends
/// after `stall_limit` consecutive expansions fail to beat the best merit
/// (`None` searches until the queue is exhausted). The returned
/// [`SubsetResult`] selects the merit-optimal subset; the last expanded subset
/// is reported separately.
pub fn cfs_search<T: Scalar>(dv: &DiscretizedView<T>, y: &[usize], stall_limit: Option<usize>) -> Result<CfsOutcome> {
    let cache = CorrelationCache::new(dv, y)?;
    cfs_search_cached(&cache, stall_limit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfsOutcome {
    pub result: SubsetResult,
    pub trace: MeritTrace,
    /// Subset expanded when the stall cutoff fired.
    pub final_expanded: Vec<usize>,
}

pub fn cfs_search_cached<T: Scalar>(cache: &CorrelationCache<'_, T>, stall_limit: Option<usize>) -> Result<CfsOutcome> {
    let p = cache.p();
    if p == 0 {
        return Err(Error::invalid("CFS needs at least one feature"));
    }
    if stall_limit == Some(0) {
        return Err(Error::invalid("stall limit must be >= 1"));
    }
    let mut open = BinaryHeap::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for f in 0..p {
        let s = vec![f];
        open.push(Open {
            merit: merit(&s, cache)?,
            subset: s.clone(),
        });
        seen.insert(s);
    }

    let mut steps = Vec::new();
    let mut best: Option<(Vec<usize>, T)> = None;
    let mut stall = 0;
    let mut last = Vec::new();
    while let Some(Open { merit: m, subset }) = open.pop() {
        steps.push((subset.clone(), m.as_f64()));
        last = subset.clone();
        let improved = best.as_ref().is_none_or(|(_, bm)| m > *bm);
        if improved {
            best = Some((subset.clone(), m));
            stall = 0;
        } else {
            stall += 1;
            if stall_limit.is_some_and(|lim| stall >= lim) {
                break;
            }
        }
        for f in 0..p {
            if subset.binary_search(&f).is_ok() {
                continue;
            }
            let mut child = subset.clone();
            let pos = child.partition_point(|&g| g < f);
            child.insert(pos, f);
            if seen.insert(child.clone()) {
                open.push(Open {
                    merit: merit(&child, cache)?,
                    subset: child,
                });
            }
        }
    }
    let (best_subset, best_merit) = best.expect("at least one subset is expanded");
    let trace: Vec<TraceStep> = steps
        .iter()
        .map(|(s, m)| TraceStep {
            subset: s.clone(),
            score: *m,
        })
        .collect();
    Ok(CfsOutcome {
        result: SubsetResult {
            selected: best_subset.clone(),
            trace,
            stopping_rule: match stall_limit {
                Some(l) => format!("best_first_stall_{l}"),
                None => "best_first_exhaustive".into(),
            },
            classifier: None,
            folds: None,
        },
        trace: MeritTrace {
            steps,
            best_subset,
            best_merit: best_merit.as_f64(),
        },
        final_expanded: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cache_from(r_cf: Vec<f64>, r_ff: Vec<Vec<f64>>) -> CorrelationCache<'static, f64> {
        CorrelationCache::from_values(r_cf, &r_ff).unwrap()
    }

    #[test]
    fn su_basics() {
        let a = [0, 1, 2, 0, 1, 2];
        assert_abs_diff_eq!(symmetrical_uncertainty::<f64>(&a, &a).unwrap(), 1.0);
        // Product-uniform table: every (u, v) pair once.
        let u = [0, 0, 1, 1];
        let v = [0, 1, 0, 1];
        assert_eq!(symmetrical_uncertainty::<f64>(&u, &v).unwrap(), 0.0);
        assert_eq!(symmetrical_uncertainty::<f64>(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert!(symmetrical_uncertainty::<f64>(&u, &v[..3]).is_err());
    }

    #[test]
    fn merit_examples() {
        let c = cache_from(vec![0.8, 0.8], vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_abs_diff_eq!(merit(&[0], &c).unwrap(), 0.8);
        assert_abs_diff_eq!(merit(&[0, 1], &c).unwrap(), 0.8, epsilon = 1e-15);
        let c = cache_from(vec![0.8, 0.8], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_abs_diff_eq!(merit(&[0, 1], &c).unwrap(), 1.6 / 2.0f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(merit(&[], &c), Err(Error::EmptySubset)));
    }

    #[test]
    fn pair_index_is_dense() {
        let p = 5;
        let mut seen = vec![false; p * (p - 1) / 2];
        for a in 0..p {
            for b in a + 1..p {
                let i = pair_index(p, a, b);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn irrelevant_redundant_feature_lowers_merit() {
        let c = cache_from(
            vec![0.6, 0.5, 0.0],
            vec![vec![1.0, 0.2, 0.3], vec![0.2, 1.0, 0.4], vec![0.3, 0.4, 1.0]],
        );
        let base = merit(&[0, 1], &c).unwrap();
        assert!(merit(&[0, 1, 2], &c).unwrap() < base);
    }

    #[test]
    fn search_prefers_smaller_subset_on_ties() {
        // Feature 1 duplicates feature 0.
        let c = cache_from(
            vec![0.9, 0.9, 0.1],
            vec![vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        );
        let out = cfs_search_cached(&c, Some(5)).unwrap();
        assert!(!(out.trace.best_subset.contains(&0) && out.trace.best_subset.contains(&1)));
        assert!(out.trace.steps.iter().all(|(_, m)| *m <= out.trace.best_merit));
    }
}
