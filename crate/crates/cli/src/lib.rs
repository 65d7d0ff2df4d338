//! `featsel` command line: one subcommand per method, JSON reports plus CSV
//! plot data in `--out`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use featsel::cfs::cfs_search;
use featsel::classify::{holdout_accuracy, similarity_spread_demo, sparsity_demo, KnnConfig, Metric};
use featsel::data::{discretize_equal_frequency, kfold, load_csv, split, Dataset};
use featsel::embedded::{
    lasso_logreg_fit, logreg_predict_proba, rf_fit, rf_oob_accuracy, rf_permutation_importance, tree_fit,
    tree_selected_features, Criterion, ForestConfig, Penalty, TreeConfig,
};
use featsel::filters::{apply_policy, rank_features, Policy, RankMethod};
use featsel::relief::ReliefConfig;
use featsel::report::{self, RankingReport, Report, RunConfig, WrapperReport};
use featsel::reproduce::{reproduce_all, write_summary, Fixtures, Protocol};
use featsel::transform::{explained_variance_ratio, lda_classifier_fit, lda_predict, pca_fit, Components, LdaOptions};
use featsel::wrappers::{
    backward_elimination, exhaustive_search, hybrid_filter_wrapper, sfs, SubsetResult, DEFAULT_EXHAUSTIVE_MAX_P,
};

#[derive(Debug, Parser)]
#[command(
    name = "featsel",
    version,
    about = "Feature selection and dimensionality reduction toolkit"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Input CSV (for reproduce-all: the directory holding the fixtures).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Name of the class-label column.
    #[arg(long, global = true, default_value = "class")]
    label: String,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Cross-validation folds.
    #[arg(long, global = true, default_value_t = 10)]
    folds: usize,
    /// Neighbours for the k-NN evaluation classifier.
    #[arg(long = "knn-k", global = true, default_value_t = 3)]
    knn_k: usize,
    /// Equal-frequency bins for chi2 / igain / CFS.
    #[arg(long, global = true, default_value_t = 10)]
    bins: usize,
    /// Held-out share for train/test evaluations.
    #[arg(long = "test-fraction", global = true, default_value_t = 0.5)]
    test_fraction: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Chi2,
    Igain,
    Relieff,
    Rf,
}

#[derive(Debug, Clone, Args)]
struct MethodOpts {
    #[arg(long, value_enum, default_value = "igain")]
    method: MethodArg,
    /// ReliefF neighbours per class.
    #[arg(long, default_value_t = 10)]
    neighbors: usize,
    /// ReliefF query samples (default: every sample once).
    #[arg(long)]
    iterations: Option<usize>,
    /// Trees for rf importance.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Permutation repeats for rf importance.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Strategy {
    Exhaustive,
    Sfs,
    Be,
    Hybrid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Cosine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoKind {
    Curse,
    Sparsity,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score and rank every feature.
    Rank(MethodOpts),
    /// Rank features and apply a selection policy.
    Select {
        #[command(flatten)]
        method: MethodOpts,
        /// top_k:N, top_fraction[:F], above_half_max or nonzero.
        #[arg(long, default_value = "top_fraction")]
        policy: String,
    },
    /// Correlation-based feature selection with best-first search.
    Cfs {
        /// Consecutive non-improving expansions before stopping (0 = exhaust the queue).
        #[arg(long, default_value_t = 5)]
        stall: usize,
    },
    /// Wrapper subset search scored by cross-validated k-NN accuracy.
    Wrap {
        #[arg(long, value_enum, default_value = "sfs")]
        strategy: Strategy,
        /// Stop at the first step that does not improve (sfs, be).
        #[arg(long)]
        first_non_improving: bool,
        /// Filter used to order prefixes for the hybrid strategy.
        #[arg(long, value_enum, default_value = "igain")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "euclidean")]
        metric: MetricArg,
        /// Refuse exhaustive search above this many features.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_MAX_P)]
        max_p: usize,
    },
    /// Decision tree; the features used by its splits are the selection.
    Tree {
        #[arg(long, default_value = "gini")]
        criterion: String,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// L1 (or L2) penalized logistic regression on two classes.
    Lasso {
        /// The two classes to keep, as `A,B` (required for more than 2 classes).
        #[arg(long, value_delimiter = ',')]
        classes: Vec<String>,
        /// Inverse penalty weight.
        #[arg(long = "c", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = "l1")]
        penalty: String,
    },
    /// Random forest OOB accuracy and permutation importance.
    Forest {
        #[arg(long, default_value_t = 100)]
        trees: usize,
        #[arg(long)]
        mtry: Option<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Principal component analysis.
    Pca {
        /// Keep this many components (default: 95% of the variance).
        #[arg(long)]
        components: Option<usize>,
        #[arg(long, default_value_t = 0.95, conflicts_with = "components")]
        variance: f64,
    },
    /// Linear discriminant analysis and its Gaussian classifier.
    Lda {
        #[arg(long)]
        components: Option<usize>,
        #[arg(long)]
        per_class_covariance: bool,
        #[arg(long)]
        scale_within_by_class_size: bool,
    },
    /// Curse-of-dimensionality demonstrations.
    Demo {
        #[arg(value_enum)]
        kind: DemoKind,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Run every reference experiment on the bundled datasets and check the results.
    ReproduceAll,
}

/// An error caused by the invocation rather than the data.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", render(&e));
            exit_code(&e)
        }
    }
}

// Library errors already embed their source; skip causes repeated verbatim.
fn render(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !msg.contains(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
    }
    msg
}

fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<Usage>() {
            return 1;
        }
        if let Some(fe) = cause.downcast_ref::<featsel::Error>() {
            return if fe.is_data_error() { 2 } else { 1 };
        }
    }
    1
}

fn knn_config(c: &Common, metric: Metric) -> anyhow::Result<KnnConfig> {
    if c.knn_k == 0 {
        return Err(usage("--knn-k must be at least 1"));
    }
    Ok(KnnConfig {
        k: c.knn_k,
        metric,
        standardize: true,
    })
}

fn run_config(c: &Common, name: &str, options: BTreeMap<String, Value>) -> RunConfig {
    RunConfig {
        subcommand: name.to_string(),
        data: c.data.as_ref().map(|p| p.display().to_string()),
        label: Some(c.label.clone()),
        seed: c.seed,
        folds: c.folds,
        knn_k: c.knn_k,
        bins: c.bins,
        test_fraction: c.test_fraction,
        out: Some(c.out.display().to_string()),
        options,
    }
}

fn options(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn load(c: &Common) -> anyhow::Result<Dataset<f64>> {
    let path = c.data.as_ref().ok_or_else(|| usage("--data is required"))?;
    Ok(load_csv(path, &c.label)?)
}

fn rank_method(m: &MethodOpts, seed: u64) -> RankMethod {
    match m.method {
        MethodArg::Chi2 => RankMethod::Chi2,
        MethodArg::Igain => RankMethod::Igain,
        MethodArg::Relieff => RankMethod::Relieff(ReliefConfig {
            iterations: m.iterations,
            neighbors: m.neighbors,
            seed,
        }),
        MethodArg::Rf => RankMethod::RfImportance {
            forest: ForestConfig {
                n_trees: m.trees,
                seed,
                ..Default::default()
            },
            repeats: m.repeats,
        },
    }
}

fn method_options(m: &MethodOpts) -> Vec<(&'static str, Value)> {
    vec![
        ("method", json!(format!("{:?}", m.method).to_lowercase())),
        ("neighbors", json!(m.neighbors)),
        ("iterations", json!(m.iterations)),
        ("trees", json!(m.trees)),
        ("repeats", json!(m.repeats)),
    ]
}

/// Writes files into `out` in a fixed order and the JSON report last.
struct Output<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Output<'a> {
    fn new(dir: &'a Path) -> Self {
        Self { dir, files: Vec::new() }
    }

    fn text(&mut self, name: &str, text: &str) -> anyhow::Result<()> {
        report::write_text(self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn report(mut self, name: &str, config: RunConfig, mut result: Value) -> anyhow::Result<()> {
        if let Value::Object(m) = &mut result {
            m.insert("files".into(), json!(self.files));
        }
        report::write_json(self.dir.join(name), &Report::new(config, result))?;
        self.files.push(name.to_string());
        println!(
            "wrote {}",
            self.files
                .iter()
                .map(|f| self.dir.join(f).display().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        Ok(())
    }
}

fn names(ds: &Dataset<f64>, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&f| ds.feature_names()[f].clone()).collect()
}

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let c = &cli.common;
    let out = Output::new(&c.out);
    match &cli.command {
        Command::Rank(m) => {
            let ds = load(c)?;
            let r = rank_features(&ds, &rank_method(m, c.seed), c.bins)?;
            let mut out = out;
            out.text("ranking.csv", &report::ranking_csv(&r, ds.feature_names())?)?;
            let cfg = run_config(c, "rank", options(&method_options(m)));
            out.report(
                "ranking.json",
                cfg,
                serde_json::to_value(RankingReport::new(&r, ds.feature_names()))?,
            )
        }
        Command::Select { method, policy } => {
            let pol: Policy = policy.parse().map_err(|e: featsel::Error| usage(e.to_string()))?;
            let ds = load(c)?;
            let r = rank_features(&ds, &rank_method(method, c.seed), c.bins)?;
            let selected = apply_policy(&r, pol)?;
            let mut opts = method_options(method);
            opts.push(("policy", json!(policy)));
            let mut out = out;
            out.text("ranking.csv", &report::ranking_csv(&r, ds.feature_names())?)?;
            out.report(
                "selection.json",
                run_config(c, "select", options(&opts)),
                json!({
                    "ranking": RankingReport::new(&r, ds.feature_names()),
                    "policy": pol,
                    "selected": selected,
                    "selected_names": names(&ds, &selected),
                }),
            )
        }
        Command::Cfs { stall } => {
            let ds = load(c)?;
            let dv = discretize_equal_frequency(&ds, c.bins)?;
            let limit = (*stall > 0).then_some(*stall);
            let o = cfs_search(&dv, ds.y(), limit)?;
            let mut out = out;
            out.text("cfs_merit.csv", &report::merit_trace_csv(&o.trace, ds.feature_names())?)?;
            out.report(
                "cfs.json",
                run_config(c, "cfs", options(&[("stall", json!(stall))])),
                json!({
                    "selected": o.result.selected,
                    "selected_names": names(&ds, &o.result.selected),
                    "best_merit": o.trace.best_merit,
                    "final_expanded": o.final_expanded,
                    "final_expanded_names": names(&ds, &o.final_expanded),
                    "stopping_rule": o.result.stopping_rule,
                }),
            )
        }
        Command::Wrap {
            strategy,
            first_non_improving,
            method,
            metric,
            max_p,
        } => {
            let ds = load(c)?;
            let metric = match metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::Cosine => Metric::Cosine,
            };
            let knn = knn_config(c, metric)?;
            let (train, test) = split(&ds, c.test_fraction, c.seed, true)?;
            let folds = kfold(&train, c.folds, c.seed, true)?;
            let complete = !first_non_improving;
            let r: SubsetResult = match strategy {
                Strategy::Exhaustive => exhaustive_search(&train, &folds, knn, *max_p)?,
                Strategy::Sfs => sfs(&train, &folds, knn, complete)?,
                Strategy::Be => backward_elimination(&train, &folds, knn, complete)?,
                Strategy::Hybrid => {
                    let opts = MethodOpts {
                        method: *method,
                        neighbors: 10,
                        iterations: None,
                        trees: 100,
                        repeats: 5,
                    };
                    let ranking = rank_features(&train, &rank_method(&opts, c.seed), c.bins)?;
                    hybrid_filter_wrapper(&train, &ranking, &folds, knn)?
                }
            };
            let test_acc = holdout_accuracy(
                &train.select_features(&r.selected)?,
                &test.select_features(&r.selected)?,
                knn,
            )?
            .accuracy;
            let baseline = holdout_accuracy(&train, &test, knn)?.accuracy;
            let strategy_name = format!("{strategy:?}").to_lowercase();
            let rep = WrapperReport {
                strategy: strategy_name.clone(),
                stopping_rule: r.stopping_rule.clone(),
                selected: r.selected.clone(),
                selected_names: names(&ds, &r.selected),
                train_cv: r.selected_score().unwrap_or(f64::NAN),
                test_accuracy: Some(test_acc),
                baseline_test_accuracy: Some(baseline),
            };
            let mut out = out;
            out.text("wrap_trace.csv", &report::wrapper_trace_csv(&r, ds.p())?)?;
            let cfg = run_config(
                c,
                "wrap",
                options(&[
                    ("strategy", json!(strategy_name)),
                    ("first_non_improving", json!(first_non_improving)),
                    ("method", json!(format!("{method:?}").to_lowercase())),
                    ("metric", json!(knn.metric)),
                    ("max_p", json!(max_p)),
                ]),
            );
            out.report("wrap.json", cfg, serde_json::to_value(rep)?)
        }
        Command::Tree { criterion, max_depth } => {
            let criterion: Criterion = criterion.parse().map_err(|e: featsel::Error| usage(e.to_string()))?;
            let ds = load(c)?;
            let (train, test) = split(&ds, c.test_fraction, c.seed, true)?;
            let cfg = TreeConfig {
                criterion,
                max_depth: *max_depth,
                ..Default::default()
            };
            let t = tree_fit(&train, cfg)?;
            let used = tree_selected_features(&t);
            let mut out = out;
            out.text("tree.txt", &t.to_text(ds.feature_names(), ds.class_names()))?;
            out.text("tree.dot", &t.to_dot(ds.feature_names(), ds.class_names()))?;
            out.report(
                "tree.json",
                run_config(
                    c,
                    "tree",
                    options(&[("criterion", json!(criterion)), ("max_depth", json!(max_depth))]),
                ),
                json!({
                    "selected": used,
                    "selected_names": names(&ds, &used),
                    "depth": t.depth(),
                    "leaves": t.n_leaves(),
                    "train_accuracy": accuracy(&t.predict(train.x())?, train.y()),
                    "test_accuracy": accuracy(&t.predict(test.x())?, test.y()),
                }),
            )
        }
        Command::Lasso {
            classes,
            c: cc,
            penalty,
        } => {
            let penalty: Penalty = penalty.parse().map_err(|e: featsel::Error| usage(e.to_string()))?;
            let ds = load(c)?;
            let bin = match classes.len() {
                0 if ds.n_classes() == 2 => ds,
                0 => {
                    return Err(usage(format!(
                        "dataset has {} classes; choose two with --classes A,B",
                        ds.n_classes()
                    )))
                }
                2 => {
                    let picked: Vec<&str> = classes.iter().map(String::as_str).collect();
                    ds.restrict_classes(&picked).map_err(|e| usage(e.to_string()))?
                }
                n => return Err(usage(format!("--classes needs exactly two names, got {n}"))),
            };
            let (train, test) = split(&bin, c.test_fraction, c.seed, true)?;
            let m = lasso_logreg_fit(&train, *cc, penalty)?;
            let predict = |d: &Dataset<f64>| -> anyhow::Result<f64> {
                let p = logreg_predict_proba(&m, d.x())?;
                let labels: Vec<usize> = p.iter().map(|&v| usize::from(v >= 0.5)).collect();
                Ok(accuracy(&labels, d.y()))
            };
            let nz = m.nonzero();
            let (b0_raw, beta_raw) = m.raw_coefficients();
            let mut out = out;
            out.text(
                "lasso_coefficients.csv",
                &report::coefficients_csv(&m, bin.feature_names())?,
            )?;
            out.report(
                "lasso.json",
                run_config(
                    c,
                    "lasso",
                    options(&[
                        ("classes", json!(bin.class_names())),
                        ("C", json!(cc)),
                        ("penalty", json!(penalty)),
                    ]),
                ),
                json!({
                    "positive_class": bin.class_names()[1],
                    "intercept": m.beta0,
                    "coefficients": m.beta,
                    "raw_intercept": b0_raw,
                    "raw_coefficients": beta_raw,
                    "nonzero": nz,
                    "nonzero_names": names(&bin, &nz),
                    "epochs": m.epochs,
                    "train_accuracy": predict(&train)?,
                    "test_accuracy": predict(&test)?,
                }),
            )
        }
        Command::Forest { trees, mtry, repeats } => {
            let ds = load(c)?;
            let cfg = ForestConfig {
                n_trees: *trees,
                mtry: *mtry,
                seed: c.seed,
                ..Default::default()
            };
            let f = rf_fit(&ds, &cfg)?;
            let imp = rf_permutation_importance(&f, &ds, *repeats, c.seed)?;
            let mut out = out;
            out.text("forest_importance.csv", &report::ranking_csv(&imp, ds.feature_names())?)?;
            out.report(
                "forest.json",
                run_config(
                    c,
                    "forest",
                    options(&[
                        ("trees", json!(trees)),
                        ("mtry", json!(f.mtry)),
                        ("repeats", json!(repeats)),
                    ]),
                ),
                json!({
                    "oob_accuracy": rf_oob_accuracy(&f, &ds)?,
                    "mean_oob_fraction": f.mean_oob_fraction(),
                    "oob_coverage": f.oob_coverage(),
                    "importance": RankingReport::new(&imp, ds.feature_names()),
                }),
            )
        }
        Command::Pca { components, variance } => {
            let ds = load(c)?;
            let comp = match components {
                Some(k) => Components::Fixed(*k),
                None => Components::VarianceThreshold(*variance),
            };
            let t = pca_fit(ds.x(), comp)?;
            let all = pca_fit(ds.x(), Components::All)?;
            let z = t.transform(ds.x())?;
            let mut out = out;
            out.text(
                "pca_scree.csv",
                &report::scree_csv(&all.values, &explained_variance_ratio(&all)?)?,
            )?;
            out.text("pca_scatter.csv", &report::scatter_csv(&z, ds.y(), ds.class_names())?)?;
            out.report(
                "pca.json",
                run_config(
                    c,
                    "pca",
                    options(&[("components", json!(components)), ("variance", json!(variance))]),
                ),
                json!({
                    "k": t.output_dim(),
                    "eigenvalues": t.values,
                    "explained_variance_ratio": explained_variance_ratio(&t)?,
                    "column_means": t.column_means,
                    "components": (0..t.output_dim()).map(|j| t.w.column(j)).collect::<Vec<_>>(),
                }),
            )
        }
        Command::Lda {
            components,
            per_class_covariance,
            scale_within_by_class_size,
        } => {
            let ds = load(c)?;
            let opts = LdaOptions {
                scale_within_by_class_size: *scale_within_by_class_size,
                per_class_covariance: *per_class_covariance,
            };
            let (train, test) = split(&ds, c.test_fraction, c.seed, true)?;
            let clf = lda_classifier_fit(&train, *components, opts)?;
            let z = clf.transform.transform(ds.x())?;
            let mut out = out;
            out.text("lda_scatter.csv", &report::scatter_csv(&z, ds.y(), ds.class_names())?)?;
            out.report(
                "lda.json",
                run_config(
                    c,
                    "lda",
                    options(&[
                        ("components", json!(components)),
                        ("per_class_covariance", json!(per_class_covariance)),
                        ("scale_within_by_class_size", json!(scale_within_by_class_size)),
                    ]),
                ),
                json!({
                    "k": clf.transform.output_dim(),
                    "eigenvalues": clf.transform.values,
                    "components": (0..clf.transform.output_dim()).map(|j| clf.transform.w.column(j)).collect::<Vec<_>>(),
                    "priors": clf.priors,
                    "train_accuracy": accuracy(&lda_predict(&clf, train.x())?, train.y()),
                    "test_accuracy": accuracy(&lda_predict(&clf, test.x())?, test.y()),
                }),
            )
        }
        Command::Demo { kind, dims, points } => {
            let mut out = out;
            let kind_name = format!("{kind:?}").to_lowercase();
            let result = match kind {
                DemoKind::Curse => {
                    let s = similarity_spread_demo::<f64>(dims, *points, c.seed)?;
                    out.text("curse.csv", &report::curse_csv(&s)?)?;
                    json!({ "iqr": s.iter().map(|x| x.iqr()).collect::<Vec<_>>() })
                }
                DemoKind::Sparsity => {
                    let clouds = sparsity_demo::<f64>(dims, *points, c.seed)?;
                    out.text("sparsity.csv", &report::sparsity_csv(&clouds)?)?;
                    json!({ "shapes": clouds.iter().map(|m| [m.rows(), m.cols()]).collect::<Vec<_>>() })
                }
            };
            out.report(
                &format!("demo_{kind_name}.json"),
                run_config(
                    c,
                    "demo",
                    options(&[
                        ("kind", json!(kind_name)),
                        ("dims", json!(dims)),
                        ("points", json!(points)),
                    ]),
                ),
                result,
            )
        }
        Command::ReproduceAll => {
            let dir = c.data.clone().unwrap_or_else(|| PathBuf::from("data"));
            let protocol = Protocol {
                seed: c.seed,
                folds: c.folds,
                knn_k: c.knn_k,
                bins: c.bins,
                test_fraction: c.test_fraction,
                ..Default::default()
            };
            let s = reproduce_all(&Fixtures::in_dir(&dir), protocol)
                .with_context(|| format!("reproducing from {}", dir.display()))?;
            write_summary(&s, &c.out)?;
            for k in &s.checks {
                println!(
                    "[{}] {:>2} {:<48} {}",
                    if k.pass { "PASS" } else { "FAIL" },
                    k.id,
                    k.name,
                    k.observed
                );
            }
            println!(
                "{} passed, {} failed; summary in {}",
                s.passed,
                s.failed,
                c.out.display()
            );
            Ok(())
        }
    }
}
