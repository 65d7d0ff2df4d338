//! Classifier-independent feature scoring: chi-square and information gain
//! over binned features, rankings, selection policies and agreement between
//! rankings.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{discretize_equal_frequency, Dataset, DiscretizedView};
use crate::error::{Error, Result};
use crate::scalar::{total_cmp, xlog2x, Scalar};

/// Default bin count for scoring numeric features.
pub const DEFAULT_BINS: usize = 10;

/// Feature-bin × class count table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_totals: Vec<usize>,
    col_totals: Vec<usize>,
    total: usize,
}

impl ContingencyTable {
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Result<Self> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged contingency table"));
        }
        let row_totals: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_totals: Vec<usize> = (0..cols).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
        let total = row_totals.iter().sum();
        Ok(Self {
            counts,
            row_totals,
            col_totals,
            total,
        })
    }

    /// Tabulates `(bin, class)` pairs.
    pub fn tabulate(bins: &[usize], n_bins: usize, labels: &[usize], n_classes: usize) -> Result<Self> {
        if bins.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: bins.len(),
                found: labels.len(),
            });
        }
        let mut counts = vec![vec![0; n_classes]; n_bins];
        for (&b, &c) in bins.iter().zip(labels) {
            if b >= n_bins || c >= n_classes {
                return Err(Error::invalid(format!("cell ({b}, {c}) outside {n_bins}×{n_classes}")));
            }
            counts[b][c] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_totals(&self) -> &[usize] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[usize] {
        &self.col_totals
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Expected count under independence, `row_total × col_total / n`.
    pub fn expected<T: Scalar>(&self, row: usize, col: usize) -> T {
        if self.total == 0 {
            return T::zero();
        }
        T::count(self.row_totals[row]) * T::count(self.col_totals[col]) / T::count(self.total)
    }

    /// Pearson chi-square statistic; cells with zero expectation are skipped.
    pub fn chi_square<T: Scalar>(&self) -> T {
        let mut stat = T::zero();
        for (r, row) in self.counts.iter().enumerate() {
            for (c, &o) in row.iter().enumerate() {
                let e: T = self.expected(r, c);
                if e > T::zero() {
                    let d = T::count(o) - e;
                    stat += d * d / e;
                }
            }
        }
        stat
    }

    /// Class entropy minus the bin-weighted conditional class entropy.
    pub fn information_gain<T: Scalar>(&self) -> T {
        let h = entropy_of_counts::<T>(&self.col_totals);
        let n = T::count(self.total.max(1));
        let cond: T = self
            .counts
            .iter()
            .zip(&self.row_totals)
            .filter(|(_, &t)| t > 0)
            .map(|(row, &t)| T::count(t) / n * entropy_of_counts::<T>(row))
            .sum();
        (h - cond).max(T::zero())
    }
}

/// Shannon entropy in bits of a count vector.
pub fn entropy_of_counts<T: Scalar>(counts: &[usize]) -> T {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let n = T::count(total);
    -counts.iter().map(|&c| xlog2x(T::count(c) / n)).sum::<T>()
}

/// Label entropy in bits.
pub fn entropy<T: Scalar>(y: &[usize]) -> Result<T> {
    if y.is_empty() {
        return Err(Error::InsufficientData("entropy of an empty label vector".into()));
    }
    let k = y.iter().copied().max().unwrap_or(0) + 1;
    let mut counts = vec![0; k];
    y.iter().for_each(|&c| counts[c] += 1);
    Ok(entropy_of_counts(&counts))
}

fn table_for<T: Scalar>(dv: &DiscretizedView<T>, y: &[usize], feature: usize) -> Result<ContingencyTable> {
    if feature >= dv.p() {
        return Err(Error::invalid(format!(
            "feature {feature} out of range (p = {})",
            dv.p()
        )));
    }
    let n_classes = y.iter().copied().max().map_or(0, |m| m + 1);
    ContingencyTable::tabulate(dv.column(feature), dv.bins_per_feature()[feature], y, n_classes)
}

pub fn chi_square_score<T: Scalar>(dv: &DiscretizedView<T>, y: &[usize], feature: usize) -> Result<T> {
    Ok(table_for(dv, y, feature)?.chi_square())
}

pub fn info_gain_score<T: Scalar>(dv: &DiscretizedView<T>, y: &[usize], feature: usize) -> Result<T> {
    Ok(table_for(dv, y, feature)?.information_gain())
}

/// Per-feature scores with a deterministic best-first order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking<T> {
    pub method: String,
    pub scores: Vec<T>,
    /// Feature indices by descending score; equal scores by ascending index.
    pub order: Vec<usize>,
    pub bins: Option<usize>,
    pub seed: Option<u64>,
}

impl<T: Scalar> FeatureRanking<T> {
    pub fn new(method: impl Into<String>, scores: Vec<T>) -> Result<Self> {
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("ranking scores must be finite"));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| total_cmp(&scores[b], &scores[a]).then(a.cmp(&b)));
        Ok(Self {
            method: method.into(),
            scores,
            order,
            bins: None,
            seed: None,
        })
    }

    pub fn p(&self) -> usize {
        self.scores.len()
    }

    /// 0-based rank position of each feature.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (r, &f) in self.order.iter().enumerate() {
            pos[f] = r;
        }
        pos
    }
}

/// Scoring methods available to [`rank_features`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum RankMethod {
    Chi2,
    Igain,
    Relieff(crate::relief::ReliefConfig),
    RfImportance {
        forest: crate::embedded::forest::ForestConfig,
        repeats: usize,
    },
}

impl FromStr for RankMethod {
    type Err = Error;

    /// Parses a method name with default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chi2" => Ok(RankMethod::Chi2),
            "igain" => Ok(RankMethod::Igain),
            "relieff" | "relief" => Ok(RankMethod::Relieff(Default::default())),
            "rf" | "rf_importance" => Ok(RankMethod::RfImportance {
                forest: Default::default(),
                repeats: 5,
            }),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

impl RankMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RankMethod::Chi2 => "chi2",
            RankMethod::Igain => "igain",
            RankMethod::Relieff(_) => "relieff",
            RankMethod::RfImportance { .. } => "rf_importance",
        }
    }
}

/// Scores every feature of `ds`; binned methods use `bins` equal-frequency bins.
pub fn rank_features<T: Scalar>(ds: &Dataset<T>, method: &RankMethod, bins: usize) -> Result<FeatureRanking<T>> {
    match method {
        RankMethod::Chi2 | RankMethod::Igain => {
            let dv = discretize_equal_frequency(ds, bins)?;
            let mut r = rank_discretized(&dv, ds.y(), method)?;
            r.bins = Some(bins);
            Ok(r)
        }
        RankMethod::Relieff(cfg) => {
            let w = crate::relief::relieff_weights(ds, cfg)?;
            let mut r = FeatureRanking::new(method.name(), w.weights)?;
            r.seed = Some(cfg.seed);
            Ok(r)
        }
        RankMethod::RfImportance { forest, repeats } => {
            let model = crate::embedded::forest::rf_fit(ds, forest)?;
            crate::embedded::forest::rf_permutation_importance(&model, ds, *repeats, forest.seed)
        }
    }
}

/// Chi-square or information-gain ranking of an existing binned view.
pub fn rank_discretized<T: Scalar>(
    dv: &DiscretizedView<T>,
    y: &[usize],
    method: &RankMethod,
) -> Result<FeatureRanking<T>> {
    let score: fn(&DiscretizedView<T>, &[usize], usize) -> Result<T> = match method {
        RankMethod::Chi2 => chi_square_score,
        RankMethod::Igain => info_gain_score,
        other => {
            return Err(Error::invalid(format!(
                "{} does not operate on binned data",
                other.name()
            )))
        }
    };
    let scores = (0..dv.p()).map(|f| score(dv, y, f)).collect::<Result<Vec<_>>>()?;
    FeatureRanking::new(method.name(), scores)
}

/// Rules turning a ranking into a feature subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum Policy {
    TopK(usize),
    /// Top `⌈fraction · p⌉` features (at least one).
    TopFraction(f64),
    /// Scores strictly greater than half the maximum score.
    AboveHalfMax,
    NonZero,
}

impl FromStr for Policy {
    type Err = Error;

    /// `top_k:N`, `top_fraction:F`, `above_half_max` or `nonzero`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        let bad = || Error::invalid(format!("cannot parse policy '{s}'"));
        match (name, arg) {
            ("top_k", Some(v)) => Ok(Policy::TopK(v.parse().map_err(|_| bad())?)),
            ("top_fraction", Some(v)) => Ok(Policy::TopFraction(v.parse().map_err(|_| bad())?)),
            ("top_fraction", None) => Ok(Policy::TopFraction(0.5)),
            ("above_half_max", None) => Ok(Policy::AboveHalfMax),
            ("nonzero", None) => Ok(Policy::NonZero),
            _ => Err(bad()),
        }
    }
}

/// Selected features in ranking order.
pub fn apply_policy<T: Scalar>(r: &FeatureRanking<T>, policy: Policy) -> Result<Vec<usize>> {
    match policy {
        Policy::TopK(0) => Err(Error::invalid("top_k needs k >= 1")),
        Policy::TopK(k) => Ok(r.order.iter().take(k).copied().collect()),
        Policy::TopFraction(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(format!("fraction {f} outside (0, 1]")));
            }
            let k = ((f * r.p() as f64).ceil() as usize).max(1);
            Ok(r.order.iter().take(k).copied().collect())
        }
        Policy::AboveHalfMax => {
            let max = r.scores.iter().copied().fold(T::neg_infinity(), T::max);
            let threshold = max * T::real(0.5);
            Ok(r.order.iter().copied().filter(|&f| r.scores[f] > threshold).collect())
        }
        Policy::NonZero => Ok(r.order.iter().copied().filter(|&f| r.scores[f] != T::zero()).collect()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    /// On raw scores.
    Pearson,
    /// On average ranks of the scores.
    Spearman,
}

pub fn rank_correlation<T: Scalar>(a: &FeatureRanking<T>, b: &FeatureRanking<T>, kind: CorrelationKind) -> Result<f64> {
    if a.p() != b.p() {
        return Err(Error::DimensionMismatch {
            expected: a.p(),
            found: b.p(),
        });
    }
    let xa: Vec<f64> = a.scores.iter().map(|s| s.as_f64()).collect();
    let xb: Vec<f64> = b.scores.iter().map(|s| s.as_f64()).collect();
    match kind {
        CorrelationKind::Pearson => pearson(&xa, &xb),
        CorrelationKind::Spearman => pearson(&average_ranks(&xa), &average_ranks(&xb)),
    }
}

/// Pearson correlation; errors on a zero-variance input.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn chi_square_hand_values() {
        let t = ContingencyTable::from_counts(vec![vec![40, 10], vec![10, 40]]).unwrap();
        assert_abs_diff_eq!(t.chi_square::<f64>(), 36.0, epsilon = 1e-12);
        // Equal proportions in both rows: independent.
        let t = ContingencyTable::from_counts(vec![vec![45, 5], vec![90, 10]]).unwrap();
        assert_abs_diff_eq!(t.chi_square::<f64>(), 0.0, epsilon = 1e-12);
        let t = ContingencyTable::from_counts(vec![vec![3, 7]]).unwrap();
        assert_eq!(t.chi_square::<f64>(), 0.0);
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(entropy::<f64>(&[0, 1, 0, 1]).unwrap(), 1.0);
        assert_eq!(entropy::<f64>(&[2, 2, 2]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            entropy::<f64>(&[0, 1, 1, 1]).unwrap(),
            0.811_278_124_459_132_8,
            epsilon = 1e-12
        );
        assert!(entropy::<f64>(&[]).is_err());
    }

    #[test]
    fn info_gain_extremes() {
        let y = vec![0, 0, 1, 1, 2, 2];
        let x = Matrix::from_rows(&[[0.0, 1.0], [0.0, 1.0], [1.0, 1.0], [1.0, 1.0], [2.0, 1.0], [2.0, 1.0]]).unwrap();
        let dv = crate::data::discretize_matrix(&x, 3).unwrap();
        let h = entropy::<f64>(&y).unwrap();
        assert_abs_diff_eq!(info_gain_score(&dv, &y, 0).unwrap(), h, epsilon = 1e-12);
        assert_eq!(info_gain_score(&dv, &y, 1).unwrap(), 0.0);
        assert_eq!(chi_square_score(&dv, &y, 1).unwrap(), 0.0);
        assert!(info_gain_score(&dv, &y, 2).is_err());
    }

    #[test]
    fn ranking_order_and_ties() {
        let r = FeatureRanking::new("t", vec![0.0f64, 0.0, 0.0]).unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
        let r = FeatureRanking::new("t", vec![1.0f64, 3.0, 3.0, 2.0]).unwrap();
        assert_eq!(r.order, vec![1, 2, 3, 0]);
        assert_eq!(r.positions(), vec![3, 0, 1, 2]);
        assert!(FeatureRanking::new("t", vec![f64::NAN]).is_err());
    }

    #[test]
    fn policies() {
        let r = FeatureRanking::new("t", vec![4.0f64, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(apply_policy(&r, Policy::TopK(2)).unwrap(), vec![0, 1]);
        assert_eq!(apply_policy(&r, Policy::TopK(9)).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(apply_policy(&r, Policy::AboveHalfMax).unwrap(), vec![0, 1]);
        assert_eq!(apply_policy(&r, Policy::TopFraction(0.5)).unwrap(), vec![0, 1]);
        assert!(apply_policy(&r, Policy::TopK(0)).is_err());
        let r = FeatureRanking::new("t", vec![1.0f64, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(apply_policy(&r, Policy::NonZero).unwrap(), vec![0, 2]);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("top_k:3".parse::<Policy>().unwrap(), Policy::TopK(3));
        assert_eq!("nonzero".parse::<Policy>().unwrap(), Policy::NonZero);
        assert!("top_k".parse::<Policy>().is_err());
        assert!("bogus".parse::<RankMethod>().is_err());
    }

    #[test]
    fn correlations() {
        let a = FeatureRanking::new("a", vec![1.0f64, 2.0, 3.0, 5.0]).unwrap();
        let rev = FeatureRanking::new("b", vec![9.0f64, 4.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            rank_correlation(&a, &a, CorrelationKind::Pearson).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rank_correlation(&a, &rev, CorrelationKind::Spearman).unwrap(),
            -1.0,
            epsilon = 1e-12
        );
        let flat = FeatureRanking::new("c", vec![1.0f64; 4]).unwrap();
        assert!(matches!(
            rank_correlation(&a, &flat, CorrelationKind::Spearman),
            Err(Error::ZeroVariance)
        ));
        let short = FeatureRanking::new("d", vec![1.0f64; 3]).unwrap();
        assert!(rank_correlation(&a, &short, CorrelationKind::Pearson).is_err());
    }

    #[test]
    fn average_ranks_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
    }
}
