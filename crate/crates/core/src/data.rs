//! Labelled datasets, CSV ingestion, hold-out splits, cross-validation
//! folds, standardization and equal-frequency discretization.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{total_cmp, Scalar};

/// Numeric object-feature matrix with integer class labels.
///
/// Class ids are contiguous `0..n_classes()` and index `class_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: Matrix<T>,
    y: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(x: Matrix<T>, y: Vec<usize>, feature_names: Vec<String>, class_names: Vec<String>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                found: y.len(),
            });
        }
        if x.cols() == 0 {
            return Err(Error::InsufficientData("dataset has no features".into()));
        }
        if x.rows() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 samples, found {}",
                x.rows()
            )));
        }
        if feature_names.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: x.cols(),
                found: feature_names.len(),
            });
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= class_names.len()) {
            return Err(Error::invalid(format!(
                "class id {bad} has no name ({} classes)",
                class_names.len()
            )));
        }
        if x.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(Self {
            x,
            y,
            feature_names,
            class_names,
        })
    }

    /// Builds a dataset with generated feature names `f0, f1, ...` and class
    /// names `c0, c1, ...`.
    pub fn from_parts(x: Matrix<T>, y: Vec<usize>) -> Result<Self> {
        let p = x.cols();
        let classes = y.iter().copied().max().map_or(0, |m| m + 1);
        Self::new(
            x,
            y,
            (0..p).map(|j| format!("f{j}")).collect(),
            (0..classes).map(|c| format!("c{c}")).collect(),
        )
    }

    #[inline]
    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> &[usize] {
        &self.y
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    #[inline]
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &c in &self.y {
            counts[c] += 1;
        }
        counts
    }

    /// Keeps only the given feature columns, in the given order.
    pub fn select_features(&self, features: &[usize]) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&bad) = features.iter().find(|&&f| f >= self.p()) {
            return Err(Error::invalid(format!(
                "feature index {bad} out of range (p = {})",
                self.p()
            )));
        }
        Ok(Self {
            x: self.x.select_columns(features),
            y: self.y.clone(),
            feature_names: features.iter().map(|&f| self.feature_names[f].clone()).collect(),
            class_names: self.class_names.clone(),
        })
    }

    /// Keeps the given rows; class ids and names are left untouched.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "row selection of {} samples",
                rows.len()
            )));
        }
        Ok(Self {
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        })
    }

    /// Restricts to the named classes and re-encodes them as `0..names.len()`
    /// in the order given.
    pub fn restrict_classes(&self, names: &[&str]) -> Result<Self> {
        let mut remap = HashMap::new();
        for (new, name) in names.iter().enumerate() {
            let old = self
                .class_index(name)
                .ok_or_else(|| Error::UnknownClass((*name).to_string()))?;
            remap.insert(old, new);
        }
        let rows: Vec<usize> = (0..self.n()).filter(|&i| remap.contains_key(&self.y[i])).collect();
        let mut out = self.select_rows(&rows)?;
        out.y.iter_mut().for_each(|c| *c = remap[c]);
        out.class_names = names.iter().map(|s| s.to_string()).collect();
        Ok(out)
    }

    pub fn with_x(&self, x: Matrix<T>) -> Result<Self> {
        let names = if x.cols() == self.p() {
            self.feature_names.clone()
        } else {
            (0..x.cols()).map(|j| format!("f{j}")).collect()
        };
        Self::new(x, self.y.clone(), names, self.class_names.clone())
    }
}

/// Reads a labelled numeric CSV file.
///
/// The header row names the columns; `label_column` becomes the class label
/// (encoded by first appearance) and every other column must parse as a
/// finite number.
pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, label_column)
}

/// Same as [`load_csv`] over any reader.
pub fn read_csv<T: Scalar, R: std::io::Read>(reader: R, label_column: &str) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::UnknownColumn(label_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut values = Vec::new();
    let mut y = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_ids: HashMap<String, usize> = HashMap::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        // Data rows are numbered from 1; the header is row 0.
        let row = r + 1;
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                let next = class_names.len();
                let id = *class_ids.entry(cell.to_string()).or_insert_with(|| {
                    class_names.push(cell.to_string());
                    next
                });
                y.push(id);
            } else {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row,
                        column: headers[j].clone(),
                        value: cell.to_string(),
                    })?;
                values.push(T::real(v));
            }
        }
    }
    if y.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 samples, found {}",
            y.len()
        )));
    }
    if class_names.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 classes, found {}",
            class_names.len()
        )));
    }
    let x = Matrix::from_vec(y.len(), feature_names.len(), values)?;
    Dataset::new(x, y, feature_names, class_names)
}

/// Row indices of a hold-out split, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split_indices<T: Scalar>(
    ds: &Dataset<T>,
    test_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut take = |mut idx: Vec<usize>, rng: &mut ChaCha8Rng| {
        idx.shuffle(rng);
        let n = idx.len();
        let n_test = ((n as f64) * test_fraction).round() as usize;
        let n_test = n_test.clamp(1, n - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    };
    if stratified {
        let groups = class_groups(ds);
        if let Some((c, _)) = groups.iter().enumerate().find(|(_, g)| g.len() == 1) {
            return Err(Error::InsufficientData(format!(
                "class '{}' has a single sample; cannot stratify",
                ds.class_names()[c]
            )));
        }
        for g in groups.into_iter().filter(|g| !g.is_empty()) {
            take(g, &mut rng);
        }
    } else {
        take((0..ds.n()).collect(), &mut rng);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

/// Splits into `(train, test)` datasets.
pub fn split<T: Scalar>(
    ds: &Dataset<T>,
    test_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Dataset<T>, Dataset<T>)> {
    let idx = split_indices(ds, test_fraction, seed, stratified)?;
    Ok((ds.select_rows(&idx.train)?, ds.select_rows(&idx.test)?))
}

fn class_groups<T: Scalar>(ds: &Dataset<T>) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); ds.n_classes()];
    for (i, &c) in ds.y().iter().enumerate() {
        groups[c].push(i);
    }
    groups
}

/// Assignment of every sample to one of `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldAssignment {
    /// Builds an assignment from explicit fold ids.
    pub fn from_ids(fold_of: Vec<usize>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        for &f in &fold_of {
            if f >= k {
                return Err(Error::invalid(format!("fold id {f} >= k = {k}")));
            }
            seen[f] = true;
        }
        if let Some(f) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("fold {f} is empty")));
        }
        Ok(Self {
            fold_of,
            k,
            seed: 0,
            stratified: false,
        })
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(train, test)` indices for one fold.
    pub fn fold_indices(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.fold_of.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

/// Assigns samples to `k` folds whose sizes differ by at most one.
///
/// Stratified assignment deals each class's shuffled members round-robin,
/// continuing the fold counter across classes, so per-class counts also differ
/// by at most one. If any class has fewer than `k` members the assignment
/// falls back to unstratified.
pub fn kfold<T: Scalar>(ds: &Dataset<T>, k: usize, seed: u64, stratified: bool) -> Result<FoldAssignment> {
    let n = ds.n();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("fold count {k} outside 2..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; n];
    let mut stratified = stratified;
    let groups = class_groups(ds);
    if stratified && groups.iter().any(|g| !g.is_empty() && g.len() < k) {
        log::warn!("a class has fewer than {k} samples; using unstratified folds");
        stratified = false;
    }
    let mut counter = 0;
    let mut deal = |mut idx: Vec<usize>, rng: &mut ChaCha8Rng| {
        idx.shuffle(rng);
        for i in idx {
            fold_of[i] = counter % k;
            counter += 1;
        }
    };
    if stratified {
        for g in groups {
            deal(g, &mut rng);
        }
    } else {
        deal((0..n).collect(), &mut rng);
    }
    Ok(FoldAssignment {
        fold_of,
        k,
        seed,
        stratified,
    })
}

/// Per-column z-scoring fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    /// Population standard deviations.
    pub stdevs: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(x: &Matrix<T>) -> Self {
        let means = x.column_means();
        let mut var = vec![T::zero(); x.cols()];
        for r in x.row_iter() {
            for ((v, &xv), &m) in var.iter_mut().zip(r).zip(&means) {
                let d = xv - m;
                *v += d * d;
            }
        }
        let n = T::count(x.rows().max(1));
        let stdevs = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Self { means, stdevs }
    }

    /// Features whose training variance is zero; they map to all-zero columns.
    pub fn is_constant(&self, j: usize) -> bool {
        // NaN counts as constant
        self.stdevs[j].partial_cmp(&(T::epsilon() * (T::one() + self.means[j].abs())))
            != Some(std::cmp::Ordering::Greater)
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        if x.cols() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            self.transform_row_in_place(out.row_mut(i));
        }
        Ok(out)
    }

    pub fn transform_row_in_place(&self, row: &mut [T]) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if self.is_constant(j) {
                T::zero()
            } else {
                (*v - self.means[j]) / self.stdevs[j]
            };
        }
    }
}

/// Integer bin ids for every feature of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedView<T> {
    /// Column-major bin ids: `bins[j][i]` is sample `i`'s bin for feature `j`.
    bins: Vec<Vec<usize>>,
    bins_per_feature: Vec<usize>,
    bin_edges: Vec<Vec<T>>,
}

impl<T: Scalar> DiscretizedView<T> {
    pub fn n(&self) -> usize {
        self.bins.first().map_or(0, Vec::len)
    }

    pub fn p(&self) -> usize {
        self.bins.len()
    }

    /// Bin ids of one feature over all samples.
    pub fn column(&self, feature: usize) -> &[usize] {
        &self.bins[feature]
    }

    pub fn bin(&self, sample: usize, feature: usize) -> usize {
        self.bins[feature][sample]
    }

    pub fn bins_per_feature(&self) -> &[usize] {
        &self.bins_per_feature
    }

    /// Upper-inclusive cut points of each feature, strictly increasing.
    pub fn bin_edges(&self) -> &[Vec<T>] {
        &self.bin_edges
    }

    /// Bins new data with the stored edges; a value equal to an edge falls in
    /// the lower bin.
    pub fn apply(&self, x: &Matrix<T>) -> Result<Vec<Vec<usize>>> {
        if x.cols() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: x.cols(),
            });
        }
        Ok((0..self.p())
            .map(|j| (0..x.rows()).map(|i| bin_of(&self.bin_edges[j], x[(i, j)])).collect())
            .collect())
    }

    /// View restricted to the given samples (edges unchanged).
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            bins: self
                .bins
                .iter()
                .map(|col| rows.iter().map(|&r| col[r]).collect())
                .collect(),
            bins_per_feature: self.bins_per_feature.clone(),
            bin_edges: self.bin_edges.clone(),
        }
    }
}

fn bin_of<T: Scalar>(edges: &[T], v: T) -> usize {
    edges.partition_point(|&e| e < v)
}

/// Equal-frequency binning of every feature into at most `bins` bins.
///
/// Cut points are the order statistics at `⌈b·n/bins⌉`, deduplicated, so tied
/// values never straddle a cut and constant features collapse to one bin.
pub fn discretize_equal_frequency<T: Scalar>(ds: &Dataset<T>, bins: usize) -> Result<DiscretizedView<T>> {
    discretize_matrix(ds.x(), bins)
}

pub fn discretize_matrix<T: Scalar>(x: &Matrix<T>, bins: usize) -> Result<DiscretizedView<T>> {
    if bins < 2 {
        return Err(Error::invalid(format!("bin count {bins} < 2")));
    }
    let n = x.rows();
    let mut out = DiscretizedView {
        bins: Vec::with_capacity(x.cols()),
        bins_per_feature: Vec::with_capacity(x.cols()),
        bin_edges: Vec::with_capacity(x.cols()),
    };
    for j in 0..x.cols() {
        let col = x.column(j);
        let mut sorted = col.clone();
        sorted.sort_by(total_cmp);
        let mut edges: Vec<T> = Vec::with_capacity(bins - 1);
        if n > 0 {
            let max = sorted[n - 1];
            for b in 1..bins {
                let pos = (b * n).div_ceil(bins);
                if pos == 0 {
                    continue;
                }
                let e = sorted[pos - 1];
                if e < max && edges.last().is_none_or(|&last| e > last) {
                    edges.push(e);
                }
            }
        }
        out.bins.push(col.iter().map(|&v| bin_of(&edges, v)).collect());
        out.bins_per_feature.push(edges.len() + 1);
        out.bin_edges.push(edges);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn toy(n: usize, classes: usize) -> Dataset<f64> {
        let x = Matrix::from_fn(n, 2, |i, j| (i * 3 + j) as f64);
        Dataset::from_parts(x, (0..n).map(|i| i % classes).collect()).unwrap()
    }

    #[test]
    fn minimal_csv() {
        let ds: Dataset<f64> = read_csv("a,label\n1.5,x\n2e3,y\n".as_bytes(), "label").unwrap();
        assert_eq!((ds.n(), ds.p(), ds.n_classes()), (2, 1, 2));
        assert_eq!(ds.x()[(1, 0)], 2000.0);
        assert_eq!(ds.class_names(), ["x", "y"]);
    }

    #[test]
    fn csv_label_column_anywhere_and_first_appearance_order() {
        let src = "lab,a,b\nz,1,2\ny,3,4\nz,5,6\n";
        let ds: Dataset<f32> = read_csv(src.as_bytes(), "lab").unwrap();
        assert_eq!(ds.feature_names(), ["a", "b"]);
        assert_eq!(ds.y(), [0, 1, 0]);
        assert_eq!(ds.class_names(), ["z", "y"]);
    }

    #[test]
    fn csv_errors() {
        let bad = read_csv::<f64, _>("a,label\n1,x\nfoo,y\n".as_bytes(), "label").unwrap_err();
        match bad {
            Error::Parse { row, column, value } => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "a", "foo"));
            }
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(
            read_csv::<f64, _>("a,label\n1,x\n".as_bytes(), "nope"),
            Err(Error::UnknownColumn(_))
        ));
        assert!(matches!(
            read_csv::<f64, _>("a,label\n1,x\n2,x\n".as_bytes(), "label"),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            read_csv::<f64, _>("a,label\n1,x\n".as_bytes(), "label"),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            read_csv::<f64, _>("a,label\nNA,x\n1,y\n".as_bytes(), "label"),
            Err(Error::Parse { .. })
        ));
        assert!(load_csv::<f64>("/definitely/not/here.csv", "x")
            .unwrap_err()
            .is_data_error());
    }

    #[test]
    fn split_is_partition_and_deterministic() {
        let ds = toy(21, 3);
        let a = split_indices(&ds, 0.5, 7, true).unwrap();
        let b = split_indices(&ds, 0.5, 7, true).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..21).collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_bad_fraction_and_singleton_class() {
        let ds = toy(10, 2);
        assert!(split(&ds, 0.0, 1, true).is_err());
        assert!(split(&ds, 1.0, 1, false).is_err());
        let mut y = vec![0; 10];
        y[3] = 1;
        let ds = Dataset::from_parts(ds.x().clone(), y).unwrap();
        assert!(split(&ds, 0.5, 1, true).is_err());
        assert!(split(&ds, 0.5, 1, false).is_ok());
    }

    #[test]
    fn kfold_sizes() {
        let f = kfold(&toy(10, 2), 5, 3, false).unwrap();
        assert_eq!(f.fold_sizes(), vec![2; 5]);
        let f = kfold(&toy(11, 2), 5, 3, false).unwrap();
        let mut s = f.fold_sizes();
        s.sort_unstable();
        assert_eq!(s, vec![2, 2, 2, 2, 3]);
        assert!(kfold(&toy(11, 2), 1, 3, false).is_err());
        assert!(kfold(&toy(11, 2), 12, 3, false).is_err());
    }

    #[test]
    fn stratified_kfold_balances_classes() {
        let ds = toy(30, 3);
        let f = kfold(&ds, 5, 11, true).unwrap();
        assert!(f.stratified);
        for c in 0..3 {
            let mut per = vec![0; 5];
            for (i, &fold) in f.fold_of.iter().enumerate() {
                if ds.y()[i] == c {
                    per[fold] += 1;
                }
            }
            assert_eq!(per, vec![2; 5]);
        }
    }

    #[test]
    fn stratified_kfold_downgrades_small_class() {
        let mut y = vec![0; 12];
        y[0] = 1;
        y[1] = 1;
        let ds = Dataset::from_parts(toy(12, 2).x().clone(), y).unwrap();
        let f = kfold(&ds, 4, 1, true).unwrap();
        assert!(!f.stratified);
        assert_eq!(f.fold_sizes(), vec![3; 4]);
    }

    #[test]
    fn standardizer_zero_mean_unit_var_and_constant_columns() {
        let x = Matrix::from_rows(&[[1.0f64, 5.0], [2.0, 5.0], [6.0, 5.0]]).unwrap();
        let s = Standardizer::fit(&x);
        assert!(s.is_constant(1));
        let z = s.transform(&x).unwrap();
        let m = z.column_means();
        assert!(m[0].abs() < 1e-12);
        assert_eq!(z.column(1), vec![0.0; 3]);
        let var: f64 = z.column(0).iter().map(|v| v * v).sum::<f64>() / 3.0;
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_frequency_examples() {
        let x = Matrix::from_rows(&[[1.0, 7.0], [2.0, 7.0], [3.0, 7.0], [4.0, 7.0]]).unwrap();
        let dv = discretize_matrix(&x, 2).unwrap();
        assert_eq!(dv.column(0), [0, 0, 1, 1]);
        let dv = discretize_matrix(&x, 10).unwrap();
        assert_eq!(dv.column(1), [0, 0, 0, 0]);
        assert_eq!(dv.bins_per_feature()[1], 1);
        assert!(discretize_matrix(&x, 1).is_err());
    }

    #[test]
    fn equal_frequency_uniform_hundred() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Matrix::from_fn(100, 1, |_, _| rng.gen::<f64>());
        let dv = discretize_matrix(&x, 10).unwrap();
        let mut pop = vec![0; dv.bins_per_feature()[0]];
        dv.column(0).iter().for_each(|&b| pop[b] += 1);
        assert_eq!(pop, vec![10; 10]);
    }

    #[test]
    fn ties_go_to_lower_bin() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [2.0], [2.0], [3.0], [4.0]]).unwrap();
        let dv = discretize_matrix(&x, 2).unwrap();
        assert_eq!(dv.bin_edges()[0], vec![2.0]);
        assert_eq!(dv.column(0), [0, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn restrict_classes_reencodes() {
        let ds = toy(9, 3);
        let sub = ds.restrict_classes(&["c2", "c0"]).unwrap();
        assert_eq!(sub.n(), 6);
        assert_eq!(sub.class_names(), ["c2", "c0"]);
        assert_eq!(sub.y(), [1, 0, 1, 0, 1, 0]);
        assert!(matches!(ds.restrict_classes(&["zz"]), Err(Error::UnknownClass(_))));
    }
}
