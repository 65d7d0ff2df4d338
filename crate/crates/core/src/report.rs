//! Report serialization: JSON reports that embed the run configuration and
//! plain CSV plot data. Column layouts are documented in `docs/formats.md`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cfs::MeritTrace;
use crate::classify::SimilaritySpread;
use crate::embedded::LogRegModel;
use crate::error::{Error, Result};
use crate::filters::FeatureRanking;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::wrappers::SubsetResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to re-run a command; echoed into every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub data: Option<String>,
    pub label: Option<String>,
    pub seed: u64,
    pub folds: usize,
    pub knn_k: usize,
    pub bins: usize,
    pub test_fraction: f64,
    pub out: Option<String>,
    /// Method-specific options, sorted by key.
    pub options: BTreeMap<String, serde_json::Value>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: String::new(),
            data: None,
            label: None,
            seed: 42,
            folds: 10,
            knn_k: 3,
            bins: crate::filters::DEFAULT_BINS,
            test_fraction: 0.5,
            out: None,
            options: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<R> {
    pub version: String,
    pub config: RunConfig,
    pub result: R,
}

impl<R> Report<R> {
    pub fn new(config: RunConfig, result: R) -> Self {
        Self {
            version: VERSION.to_string(),
            config,
            result,
        }
    }
}

pub fn to_json<V: Serialize>(value: &V) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<V: Serialize>(path: impl AsRef<Path>, value: &V) -> Result<()> {
    write_text(path, &to_json(value)?)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Hex bitmask of a subset; bit `j` stands for feature `j`, most significant
/// nibble first, `ceil(p/4)` digits.
pub fn subset_bitmask_hex(subset: &[usize], p: usize) -> String {
    let digits = p.div_ceil(4).max(1);
    let mut nibbles = vec![0u8; digits];
    for &f in subset {
        nibbles[f / 4] |= 1 << (f % 4);
    }
    nibbles.iter().rev().map(|n| format!("{n:x}")).collect()
}

/// JSON view of a ranking with feature names attached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankingReport {
    pub method: String,
    pub bins: Option<usize>,
    pub seed: Option<u64>,
    /// Best first.
    pub features: Vec<RankedFeature>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankedFeature {
    pub rank: usize,
    pub index: usize,
    pub name: String,
    pub score: f64,
}

impl RankingReport {
    pub fn new<T: Scalar>(r: &FeatureRanking<T>, names: &[String]) -> Self {
        Self {
            method: r.method.clone(),
            bins: r.bins,
            seed: r.seed,
            features: r
                .order
                .iter()
                .enumerate()
                .map(|(rank, &f)| RankedFeature {
                    rank: rank + 1,
                    index: f,
                    name: names[f].clone(),
                    score: r.scores[f].as_f64(),
                })
                .collect(),
        }
    }
}

pub fn ranking_csv<T: Scalar>(r: &FeatureRanking<T>, names: &[String]) -> Result<String> {
    csv_string(
        &["rank", "feature", "score"],
        r.order
            .iter()
            .enumerate()
            .map(|(i, &f)| vec![(i + 1).to_string(), names[f].clone(), r.scores[f].to_string()]),
    )
}

pub fn merit_trace_csv(trace: &MeritTrace, names: &[String]) -> Result<String> {
    csv_string(
        &["step", "subset", "merit"],
        trace.steps.iter().enumerate().map(|(i, (s, m))| {
            vec![
                (i + 1).to_string(),
                s.iter().map(|&f| names[f].as_str()).collect::<Vec<_>>().join(";"),
                m.to_string(),
            ]
        }),
    )
}

pub fn wrapper_trace_csv(r: &SubsetResult, p: usize) -> Result<String> {
    csv_string(
        &["step", "subset_bitmask_hex", "cv_accuracy"],
        r.trace.iter().enumerate().map(|(i, s)| {
            vec![
                (i + 1).to_string(),
                subset_bitmask_hex(&s.subset, p),
                s.score.to_string(),
            ]
        }),
    )
}

/// Final wrapper selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WrapperReport {
    pub strategy: String,
    pub stopping_rule: String,
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    pub train_cv: f64,
    pub test_accuracy: Option<f64>,
    pub baseline_test_accuracy: Option<f64>,
}

pub fn coefficients_csv<T: Scalar>(m: &LogRegModel<T>, names: &[String]) -> Result<String> {
    csv_string(
        &["feature", "beta", "abs_beta", "C"],
        m.beta
            .iter()
            .enumerate()
            .map(|(j, b)| vec![names[j].clone(), b.to_string(), b.abs().to_string(), m.c.to_string()]),
    )
}

/// Projected coordinates with the class label in the first column.
pub fn scatter_csv<T: Scalar>(z: &Matrix<T>, y: &[usize], class_names: &[String]) -> Result<String> {
    let header: Vec<String> = std::iter::once("class".to_string())
        .chain((1..=z.cols()).map(|j| format!("c{j}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(
        &header,
        z.row_iter().zip(y).map(|(r, &c)| {
            std::iter::once(class_names[c].clone())
                .chain(r.iter().map(|v| v.to_string()))
                .collect()
        }),
    )
}

pub fn scree_csv<T: Scalar>(values: &[T], ratios: &[T]) -> Result<String> {
    let mut cum = 0.0;
    csv_string(
        &["component", "eigenvalue", "variance_ratio", "cumulative"],
        values.iter().zip(ratios).enumerate().map(|(i, (v, r))| {
            cum += r.as_f64();
            vec![(i + 1).to_string(), v.to_string(), r.to_string(), cum.to_string()]
        }),
    )
}

pub fn curse_csv(spreads: &[SimilaritySpread]) -> Result<String> {
    csv_string(
        &["dims", "min", "q1", "median", "q3", "max", "iqr"],
        spreads.iter().map(|s| {
            std::iter::once(s.dim.to_string())
                .chain([s.min, s.q1, s.median, s.q3, s.max, s.iqr()].iter().map(f64::to_string))
                .collect()
        }),
    )
}

/// Points of each sparsity-demo cloud: `dims, point, x1, x2, ...` (missing
/// coordinates left empty).
pub fn sparsity_csv<T: Scalar>(clouds: &[Matrix<T>]) -> Result<String> {
    let width = clouds.iter().map(Matrix::cols).max().unwrap_or(0);
    let header: Vec<String> = ["dims".to_string(), "point".to_string()]
        .into_iter()
        .chain((1..=width).map(|j| format!("x{j}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = clouds.iter().flat_map(|m| {
        m.row_iter().enumerate().map(move |(i, r)| {
            let mut row = vec![m.cols().to_string(), i.to_string()];
            row.extend(r.iter().map(|v| v.to_string()));
            row.resize(width + 2, String::new());
            row
        })
    });
    csv_string(&header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitmask() {
        assert_eq!(subset_bitmask_hex(&[0], 4), "1");
        assert_eq!(subset_bitmask_hex(&[0, 3], 4), "9");
        assert_eq!(subset_bitmask_hex(&[4], 19), "00010");
        assert_eq!(subset_bitmask_hex(&[18], 19), "40000");
    }

    #[test]
    fn ranking_outputs() {
        let r = FeatureRanking::new("igain", vec![0.1f64, 0.5]).unwrap();
        let names = vec!["a".to_string(), "b,c".to_string()];
        let csv = ranking_csv(&r, &names).unwrap();
        assert_eq!(csv, "rank,feature,score\n1,\"b,c\",0.5\n2,a,0.1\n");
        let rep = RankingReport::new(&r, &names);
        assert_eq!(rep.features[0].index, 1);
    }
}
