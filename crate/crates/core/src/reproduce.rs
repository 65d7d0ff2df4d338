//! End-to-end runs of the reference experiments on the bundled
//! Penguins and Segmentation fixtures, compared with the published numbers.
//!
//! Every stochastic step derives from one seed and all parallel work is
//! reduced in a fixed order, so the summary is byte-identical across runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{holdout_accuracy, similarity_spread_demo, KnnConfig};
use crate::data::{kfold, load_csv, split, Dataset};
use crate::embedded::{
    lasso_logreg_fit, rf_fit, rf_oob_accuracy, rf_permutation_importance, tree_fit, tree_selected_features,
    ForestConfig, Penalty, TreeConfig,
};
use crate::error::{Error, Result};
use crate::filters::{rank_correlation, rank_features, CorrelationKind, RankMethod};
use crate::linalg::Matrix;
use crate::relief::ReliefConfig;
use crate::transform::{explained_variance_ratio, lda_classifier_fit, lda_predict, pca_fit, Components, LdaOptions};
use crate::wrappers::{backward_elimination, hybrid_filter_wrapper, sfs};

pub const PENGUINS: &str = "penguins.csv";
pub const SEGMENTATION: &str = "segmentation.csv";

/// Protocol settings shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub seed: u64,
    pub folds: usize,
    pub knn_k: usize,
    pub bins: usize,
    pub test_fraction: f64,
    pub forest_trees: usize,
    pub importance_repeats: usize,
    /// Split seeds used for the decision-tree stability check.
    pub tree_seeds: usize,
    /// Seeds used for the curse-of-dimensionality check.
    pub curse_seeds: usize,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            seed: 42,
            folds: 10,
            knn_k: 3,
            bins: crate::filters::DEFAULT_BINS,
            test_fraction: 0.5,
            forest_trees: 100,
            importance_repeats: 5,
            tree_seeds: 10,
            curse_seeds: 100,
        }
    }
}

impl Protocol {
    fn knn(&self) -> KnnConfig {
        KnnConfig {
            k: self.knn_k,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    /// Published reference value.
    pub reference: String,
    /// Acceptance rule applied to `observed`.
    pub rule: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub protocol: Protocol,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

/// Paths of the bundled fixtures.
#[derive(Debug, Clone)]
pub struct Fixtures {
    pub penguins: PathBuf,
    pub segmentation: PathBuf,
}

impl Fixtures {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        Self {
            penguins: dir.as_ref().join(PENGUINS),
            segmentation: dir.as_ref().join(SEGMENTATION),
        }
    }

    pub fn load(&self) -> Result<(Dataset<f64>, Dataset<f64>)> {
        for p in [&self.penguins, &self.segmentation] {
            if !p.is_file() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "fixture not found"),
                ));
            }
        }
        Ok((
            load_csv(&self.penguins, "species")?,
            load_csv(&self.segmentation, "class")?,
        ))
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol + 1e-12
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, id: u32, name: &str, reference: &str, rule: &str, observed: String, pass: bool) {
        self.0.push(Check {
            id,
            name: name.into(),
            reference: reference.into(),
            rule: rule.into(),
            observed,
            pass,
        });
    }
}

fn feature(ds: &Dataset<f64>, name: &str) -> Result<usize> {
    ds.feature_index(name).ok_or_else(|| Error::UnknownColumn(name.into()))
}

/// Runs every reference experiment.
pub fn reproduce_all(fixtures: &Fixtures, protocol: Protocol) -> Result<Summary> {
    let (peng, seg) = fixtures.load()?;
    let pr = protocol;
    let knn = pr.knn();
    let mut c = Checks(Vec::new());

    c.push(
        1,
        "penguins shape",
        "333 x 4, 3 classes",
        "exact",
        format!("{} x {}, {} classes", peng.n(), peng.p(), peng.n_classes()),
        (peng.n(), peng.p(), peng.n_classes()) == (333, 4, 3),
    );
    c.push(
        1,
        "segmentation shape",
        "2310 x 19, 7 classes",
        "exact",
        format!("{} x {}, {} classes", seg.n(), seg.p(), seg.n_classes()),
        (seg.n(), seg.p(), seg.n_classes()) == (2310, 19, 7),
    );

    // Filters on the full Segmentation data.
    let ig = rank_features(&seg, &RankMethod::Igain, pr.bins)?;
    let chi = rank_features(&seg, &RankMethod::Chi2, pr.bins)?;
    let relief = rank_features(
        &seg,
        &RankMethod::Relieff(ReliefConfig {
            seed: pr.seed,
            ..Default::default()
        }),
        pr.bins,
    )?;
    let r = rank_correlation(&ig, &chi, CorrelationKind::Pearson)?;
    c.push(
        2,
        "pearson(igain, chi2) segmentation",
        "0.86",
        "0.86 +/- 0.10",
        f4(r),
        within(r, 0.86, 0.10),
    );
    let r = rank_correlation(&relief, &ig, CorrelationKind::Spearman)?;
    c.push(
        2,
        "spearman(relieff, igain) segmentation",
        "0.91",
        "0.91 +/- 0.10",
        f4(r),
        within(r, 0.91, 0.10),
    );

    // Hold-out protocol on Segmentation: search on train, report on test.
    let (train, test) = split(&seg, pr.test_fraction, pr.seed, true)?;
    let folds = kfold(&train, pr.folds, pr.seed, true)?;
    let baseline = holdout_accuracy(&train, &test, knn)?.accuracy;
    let ig_train = rank_features(&train, &RankMethod::Igain, pr.bins)?;
    let top10 = &ig_train.order[..10];
    let acc10 = holdout_accuracy(&train.select_features(top10)?, &test.select_features(top10)?, knn)?.accuracy;
    c.push(
        3,
        "top-10 igain test accuracy vs all features",
        "no loss with 10 of 19 features",
        "|delta| <= 0.02",
        format!("{} vs {}", f4(acc10), f4(baseline)),
        (acc10 - baseline).abs() <= 0.02,
    );

    let hybrid = hybrid_filter_wrapper(&train, &ig_train, &folds, knn)?;
    c.push(
        4,
        "hybrid igain prefix size",
        "9",
        "9 +/- 2",
        hybrid.selected.len().to_string(),
        hybrid.selected.len().abs_diff(9) <= 2,
    );

    let fwd = sfs(&train, &folds, knn, true)?;
    let bwd = backward_elimination(&train, &folds, knn, true)?;
    c.push(
        5,
        "sfs subset size",
        "7",
        "7 +/- 2",
        fwd.selected.len().to_string(),
        fwd.selected.len().abs_diff(7) <= 2,
    );
    c.push(
        5,
        "be subset size",
        "11",
        "11 +/- 2",
        bwd.selected.len().to_string(),
        bwd.selected.len().abs_diff(11) <= 2,
    );
    let sfs_test = holdout_accuracy(
        &train.select_features(&fwd.selected)?,
        &test.select_features(&fwd.selected)?,
        knn,
    )?
    .accuracy;
    c.push(
        5,
        "sfs test accuracy vs all features",
        "no loss",
        ">= baseline - 0.01",
        format!("{} vs {}", f4(sfs_test), f4(baseline)),
        sfs_test >= baseline - 0.01,
    );

    // Decision tree on 50:50 Penguins splits.
    let body_mass = feature(&peng, "body_mass_g")?;
    let mut accs = Vec::new();
    let mut without_mass = 0;
    for s in 0..pr.tree_seeds as u64 {
        let (tr, te) = split(&peng, 0.5, pr.seed + s, true)?;
        let tree = tree_fit(&tr, TreeConfig::default())?;
        let pred = tree.predict(te.x())?;
        accs.push(pred.iter().zip(te.y()).filter(|(a, b)| a == b).count() as f64 / te.n() as f64);
        if !tree_selected_features(&tree).contains(&body_mass) {
            without_mass += 1;
        }
    }
    let acc0 = accs[0];
    c.push(
        6,
        "tree test accuracy penguins",
        "0.93",
        ">= 0.90",
        f4(acc0),
        acc0 >= 0.90,
    );
    let need = (pr.tree_seeds * 8).div_ceil(10);
    c.push(
        6,
        "tree omits body_mass",
        "3 of 4 features, body_mass not used",
        &format!(">= {need}/{} split seeds", pr.tree_seeds),
        format!("{without_mass}/{}", pr.tree_seeds),
        without_mass >= need,
    );

    // Lasso on the binary reductions.
    let lasso_counts = |ds: &Dataset<f64>, classes: [&str; 2]| -> Result<(usize, usize)> {
        let bin = ds.restrict_classes(&classes)?;
        let (tr, _) = split(&bin, pr.test_fraction, pr.seed, true)?;
        let one = lasso_logreg_fit(&tr, 1.0, Penalty::L1)?.nonzero().len();
        let ten = lasso_logreg_fit(&tr, 10.0, Penalty::L1)?.nonzero().len();
        Ok((one, ten))
    };
    let (p1, p10) = lasso_counts(&peng, ["Adelie", "Chinstrap"])?;
    let (s1, s10) = lasso_counts(&seg, ["cement", "window"])?;
    c.push(
        7,
        "lasso C=1 nonzeros penguins",
        "2",
        "exactly 2",
        p1.to_string(),
        p1 == 2,
    );
    c.push(
        7,
        "lasso C=1 nonzeros segmentation",
        "3",
        "3 +/- 1",
        s1.to_string(),
        s1.abs_diff(3) <= 1,
    );
    c.push(
        7,
        "lasso C=10 keeps more features",
        "more features at C=10",
        "nonzeros(C=10) > nonzeros(C=1) on both",
        format!("penguins {p1}->{p10}, segmentation {s1}->{s10}"),
        p10 > p1 && s10 > s1,
    );

    // Random forest.
    let forest_cfg = ForestConfig {
        n_trees: pr.forest_trees,
        seed: pr.seed,
        ..Default::default()
    };
    let fp = rf_fit(&peng, &forest_cfg)?;
    let fs = rf_fit(&seg, &forest_cfg)?;
    let oob = (fp.mean_oob_fraction() + fs.mean_oob_fraction()) / 2.0;
    c.push(
        8,
        "mean oob fraction",
        "roughly 37%",
        "0.368 +/- 0.02",
        f4(oob),
        within(oob, 0.368, 0.02),
    );
    let oob_acc = rf_oob_accuracy(&fp, &peng)?;
    c.push(
        8,
        "forest oob accuracy penguins",
        "-",
        ">= 0.93",
        f4(oob_acc),
        oob_acc >= 0.93,
    );
    let imp_p = rf_permutation_importance(&fp, &peng, pr.importance_repeats, pr.seed)?;
    let imp_s = rf_permutation_importance(&fs, &seg, pr.importance_repeats, pr.seed)?;
    let top = peng.feature_names()[imp_p.order[0]].clone();
    c.push(
        8,
        "rf importance top feature penguins",
        "flipper_length",
        "flipper_length_mm first",
        top.clone(),
        top == "flipper_length_mm",
    );
    let ig_p = rank_features(&peng, &RankMethod::Igain, pr.bins)?;
    let rp = rank_correlation(&imp_p, &ig_p, CorrelationKind::Pearson)?;
    let rs = rank_correlation(&imp_s, &ig, CorrelationKind::Pearson)?;
    c.push(
        8,
        "pearson(rf, igain) penguins",
        "0.8",
        "0.8 +/- 0.15",
        f4(rp),
        within(rp, 0.8, 0.15),
    );
    c.push(
        8,
        "pearson(rf, igain) segmentation",
        "0.92",
        "0.92 +/- 0.10",
        f4(rs),
        within(rs, 0.92, 0.10),
    );

    // LDA on 50:50 Penguins.
    let (tr, te) = split(&peng, 0.5, pr.seed, true)?;
    let clf = lda_classifier_fit(&tr, None, LdaOptions::default())?;
    let pred = lda_predict(&clf, te.x())?;
    let lda_acc = pred.iter().zip(te.y()).filter(|(a, b)| a == b).count() as f64 / te.n() as f64;
    c.push(
        9,
        "lda hold-out accuracy penguins",
        "0.97",
        "0.97 +/- 0.03",
        f4(lda_acc),
        within(lda_acc, 0.97, 0.03),
    );

    // PCA properties on Penguins (the original PCA data is unpublished).
    let t = pca_fit(peng.x(), Components::All)?;
    let z = t.transform(peng.x())?;
    let cov = z.covariance()?;
    let wtw = t.w.transpose().matmul(&t.w)?;
    let ortho = wtw.max_abs_diff(&Matrix::identity(t.output_dim()));
    let off: f64 = (0..cov.rows())
        .flat_map(|i| (0..cov.cols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| cov[(i, j)].abs())
        .fold(0.0, f64::max);
    let trace_gap = (t.total - peng.x().covariance()?.trace()).abs() / t.total;
    let ratio_sum: f64 = explained_variance_ratio(&t)?.iter().sum();
    let pca_ok = ortho < 1e-8 && off < 1e-8 * t.total && trace_gap < 1e-8 && within(ratio_sum, 1.0, 1e-8);
    c.push(
        10,
        "pca properties penguins",
        "81% in 2 PCs (source data unpublished)",
        "orthonormal W, diagonal covariance, variance conserved (1e-8)",
        format!("|WtW-I| {ortho:.1e}, offdiag {off:.1e}, trace gap {trace_gap:.1e}"),
        pca_ok,
    );

    // Curse of dimensionality: similarity spread narrows with dimension.
    let dims = [5, 10, 20];
    let mut shrinking = 0;
    for s in 0..pr.curse_seeds as u64 {
        let spreads = similarity_spread_demo::<f64>(&dims, 1000, pr.seed + s)?;
        if spreads.windows(2).all(|w| w[1].iqr() < w[0].iqr()) {
            shrinking += 1;
        }
    }
    let need = (pr.curse_seeds * 95).div_ceil(100);
    c.push(
        12,
        "cosine similarity iqr shrinks over dims 5,10,20",
        "spread narrows with dimension",
        &format!(">= {need}/{} seeds", pr.curse_seeds),
        format!("{shrinking}/{}", pr.curse_seeds),
        shrinking >= need,
    );

    let passed = c.0.iter().filter(|k| k.pass).count();
    Ok(Summary {
        version: crate::report::VERSION.to_string(),
        protocol,
        failed: c.0.len() - passed,
        passed,
        checks: c.0,
    })
}

pub fn summary_csv(s: &Summary) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["id", "name", "reference", "rule", "observed", "pass"])?;
    for k in &s.checks {
        w.write_record([
            k.id.to_string(),
            k.name.clone(),
            k.reference.clone(),
            k.rule.clone(),
            k.observed.clone(),
            k.pass.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Writes `summary.json` and `summary.csv` into `out_dir`.
pub fn write_summary(s: &Summary, out_dir: impl AsRef<Path>) -> Result<()> {
    let dir = out_dir.as_ref();
    crate::report::write_json(dir.join("summary.json"), s)?;
    crate::report::write_text(dir.join("summary.csv"), &summary_csv(s)?)
}
