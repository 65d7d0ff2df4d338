//! CART classification tree on numeric thresholds.
//!
//! Samples with `x[f] <= threshold` go left. Candidate thresholds are the
//! midpoints between consecutive distinct values of the node's samples. The
//! split with the lowest weighted child impurity wins; ties keep the lower
//! feature index, then the lower threshold. A node keeps splitting while it is
//! impure and some feature still varies, so an unlimited tree fits distinct
//! training data exactly.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::argmax_first;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

impl Criterion {
    fn impurity(self, counts: &[usize], n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let n = n as f64;
        match self {
            Criterion::Gini => 1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>(),
            Criterion::Entropy => -counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let q = c as f64 / n;
                    q * q.log2()
                })
                .sum::<f64>(),
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node<T> {
    Leaf {
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
        counts: Vec<usize>,
    },
}

impl<T> Node<T> {
    /// Training class distribution of the node.
    pub fn counts(&self) -> &[usize] {
        match self {
            Node::Leaf { counts } | Node::Split { counts, .. } => counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel<T> {
    /// Node 0 is the root.
    pub nodes: Vec<Node<T>>,
    pub config: TreeConfig,
    pub p: usize,
    pub n_classes: usize,
}

/// Fits an unpruned (unless `max_depth` is set) tree on every sample.
pub fn tree_fit<T: Scalar>(train: &Dataset<T>, config: TreeConfig) -> Result<TreeModel<T>> {
    let rows: Vec<usize> = (0..train.n()).collect();
    grow(train, &rows, config, None)
}

/// Per-split feature subsampling for forests.
pub(crate) struct Subspace<'a> {
    pub mtry: usize,
    pub rng: &'a mut ChaCha8Rng,
}

/// Grows a tree on `rows` (duplicates allowed, as in a bootstrap bag).
pub(crate) fn grow<T: Scalar>(
    ds: &Dataset<T>,
    rows: &[usize],
    config: TreeConfig,
    mut subspace: Option<Subspace<'_>>,
) -> Result<TreeModel<T>> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("tree needs at least one sample".into()));
    }
    if config.min_samples_split < 2 {
        return Err(Error::invalid("min_samples_split must be at least 2"));
    }
    if let Some(s) = &subspace {
        if s.mtry == 0 || s.mtry > ds.p() {
            return Err(Error::invalid(format!("mtry = {} outside 1..={}", s.mtry, ds.p())));
        }
    }
    let mut model = TreeModel {
        nodes: Vec::new(),
        config,
        p: ds.p(),
        n_classes: ds.n_classes(),
    };
    // Depth-first with an explicit stack; children are allocated when the
    // parent splits so node ids follow pre-order of allocation.
    model.nodes.push(Node::Leaf { counts: Vec::new() });
    let mut stack = vec![(0usize, rows.to_vec(), 0usize)];
    while let Some((id, idx, depth)) = stack.pop() {
        let counts = class_counts(ds.y(), &idx, ds.n_classes());
        let impure = counts.iter().filter(|&&c| c > 0).count() > 1;
        let may_split = impure && idx.len() >= config.min_samples_split && config.max_depth.is_none_or(|d| depth < d);
        let split = if may_split {
            best_split(ds, &idx, &counts, config.criterion, subspace.as_mut())
        } else {
            None
        };
        match split {
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| ds.x()[(i, feature)] <= threshold);
                let left = model.nodes.len();
                model.nodes.push(Node::Leaf { counts: Vec::new() });
                model.nodes.push(Node::Leaf { counts: Vec::new() });
                model.nodes[id] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right: left + 1,
                    counts,
                };
                stack.push((left + 1, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
            None => model.nodes[id] = Node::Leaf { counts },
        }
    }
    Ok(model)
}

fn class_counts(y: &[usize], idx: &[usize], n_classes: usize) -> Vec<usize> {
    let mut c = vec![0; n_classes];
    for &i in idx {
        c[y[i]] += 1;
    }
    c
}

fn best_split<T: Scalar>(
    ds: &Dataset<T>,
    idx: &[usize],
    counts: &[usize],
    criterion: Criterion,
    subspace: Option<&mut Subspace<'_>>,
) -> Option<(usize, T)> {
    let p = ds.p();
    let search = |features: &[usize]| {
        let mut best: Option<(f64, usize, T)> = None;
        for &f in features {
            if let Some((score, t)) = best_threshold(ds, idx, counts, f, criterion) {
                if best.is_none_or(|(s, _, _)| score < s) {
                    best = Some((score, f, t));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    };
    match subspace {
        None => search(&(0..p).collect::<Vec<_>>()),
        Some(s) => {
            let mut all: Vec<usize> = (0..p).collect();
            all.shuffle(s.rng);
            let mut first = all[..s.mtry].to_vec();
            first.sort_unstable();
            // If none of the drawn features can split the node, fall back to
            // the remaining ones rather than stopping early.
            search(&first).or_else(|| {
                let mut rest = all[s.mtry..].to_vec();
                rest.sort_unstable();
                search(&rest)
            })
        }
    }
}

/// Lowest weighted child impurity for feature `f`, with its threshold.
fn best_threshold<T: Scalar>(
    ds: &Dataset<T>,
    idx: &[usize],
    counts: &[usize],
    f: usize,
    criterion: Criterion,
) -> Option<(f64, T)> {
    let x = ds.x();
    let y = ds.y();
    let mut order = idx.to_vec();
    order.sort_by(|&a, &b| total_cmp(&x[(a, f)], &x[(b, f)]));
    let n = order.len();
    let mut left = vec![0usize; counts.len()];
    let mut right = counts.to_vec();
    let mut best: Option<(f64, T)> = None;
    for s in 0..n - 1 {
        let c = y[order[s]];
        left[c] += 1;
        right[c] -= 1;
        let (a, b) = (x[(order[s], f)], x[(order[s + 1], f)]);
        if a == b {
            continue;
        }
        let nl = s + 1;
        let score = nl as f64 * criterion.impurity(&left, nl) + (n - nl) as f64 * criterion.impurity(&right, n - nl);
        if best.is_none_or(|(bs, _)| score < bs) {
            let mut t = (a + b) / T::real(2.0);
            if t >= b {
                t = a;
            }
            best = Some((score, t));
        }
    }
    best
}

impl<T: Scalar> TreeModel<T> {
    fn leaf_of(&self, row: &[T]) -> &[usize] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => id = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Majority class of the reached leaf; ties go to the smaller class id.
    pub fn predict_row(&self, row: &[T]) -> usize {
        argmax_first(self.leaf_of(row))
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<usize>> {
        if x.cols() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: x.cols(),
            });
        }
        Ok(x.row_iter().map(|r| self.predict_row(r)).collect())
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Indented text rendering.
    pub fn to_text(&self, feature_names: &[String], class_names: &[String]) -> String {
        let mut out = String::new();
        self.text_node(0, 0, feature_names, class_names, &mut out);
        out
    }

    fn text_node(&self, id: usize, depth: usize, fnames: &[String], cnames: &[String], out: &mut String) {
        let pad = "|   ".repeat(depth);
        match &self.nodes[id] {
            Node::Leaf { counts } => {
                let _ = writeln!(out, "{pad}class: {} {:?}", label(cnames, argmax_first(counts)), counts);
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                let name = label(fnames, *feature);
                let _ = writeln!(out, "{pad}{name} <= {threshold}");
                self.text_node(*left, depth + 1, fnames, cnames, out);
                let _ = writeln!(out, "{pad}{name} > {threshold}");
                self.text_node(*right, depth + 1, fnames, cnames, out);
            }
        }
    }

    /// Graphviz rendering.
    pub fn to_dot(&self, feature_names: &[String], class_names: &[String]) -> String {
        let mut out = String::from("digraph tree {\n    node [shape=box];\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let counts = node.counts();
            let n: usize = counts.iter().sum();
            match node {
                Node::Leaf { .. } => {
                    let _ = writeln!(
                        out,
                        "    n{id} [label=\"samples = {n}\\nvalue = {counts:?}\\nclass = {}\"];",
                        label(class_names, argmax_first(counts))
                    );
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let _ = writeln!(
                        out,
                        "    n{id} [label=\"{} <= {threshold}\\nsamples = {n}\\nvalue = {counts:?}\"];",
                        label(feature_names, *feature)
                    );
                    let _ = writeln!(out, "    n{id} -> n{left} [label=\"True\"];");
                    let _ = writeln!(out, "    n{id} -> n{right} [label=\"False\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn label(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| i.to_string())
}

/// Features used by at least one internal node, ascending.
pub fn tree_selected_features<T>(model: &TreeModel<T>) -> Vec<usize> {
    model
        .nodes
        .iter()
        .filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[[f64; 2]], y: Vec<usize>) -> Dataset<f64> {
        Dataset::from_parts(Matrix::from_rows(rows).unwrap(), y).unwrap()
    }

    #[test]
    fn threshold_separable() {
        let d = ds(&[[1.0, 5.0], [2.0, 1.0], [3.0, 4.0], [4.0, 2.0]], vec![0, 0, 1, 1]);
        let t = tree_fit(&d, TreeConfig::default()).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(tree_selected_features(&t), vec![0]);
        assert_eq!(t.predict(d.x()).unwrap(), vec![0, 0, 1, 1]);
        match &t.nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(*threshold, 2.5),
            _ => panic!("root should split"),
        }
    }

    #[test]
    fn pure_input_is_single_leaf() {
        let d = ds(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], vec![0, 0, 0]);
        let t = tree_fit(&d, TreeConfig::default()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!(tree_selected_features(&t).is_empty());
    }

    #[test]
    fn xor_needs_zero_gain_root() {
        // The root split has zero gini gain; the tree must still fit exactly.
        let d = ds(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], vec![0, 1, 1, 0]);
        let t = tree_fit(&d, TreeConfig::default()).unwrap();
        assert_eq!(t.predict(d.x()).unwrap(), vec![0, 1, 1, 0]);
        let stump = tree_fit(
            &d,
            TreeConfig {
                max_depth: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(tree_selected_features(&stump).len(), 1);
    }

    #[test]
    fn leaf_counts_sum_to_node_counts() {
        let d = ds(
            &[[1.0, 0.0], [2.0, 1.0], [3.0, 0.0], [4.0, 1.0], [5.0, 0.5], [6.0, 0.2]],
            vec![0, 1, 0, 1, 2, 2],
        );
        let t = tree_fit(
            &d,
            TreeConfig {
                criterion: Criterion::Entropy,
                ..Default::default()
            },
        )
        .unwrap();
        for n in &t.nodes {
            if let Node::Split {
                left, right, counts, ..
            } = n
            {
                let l = t.nodes[*left].counts();
                let r = t.nodes[*right].counts();
                for c in 0..3 {
                    assert_eq!(counts[c], l[c] + r[c]);
                }
            }
        }
        assert_eq!(t.predict(d.x()).unwrap(), d.y());
        let dot = t.to_dot(d.feature_names(), d.class_names());
        assert!(dot.starts_with("digraph") && dot.contains("->"));
        assert!(t.to_text(d.feature_names(), d.class_names()).contains("f0 <="));
    }
}
