use std::fs;
use std::path::{Path, PathBuf};

use featsel_cli::run;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn featsel(args: &[&str]) -> i32 {
    run(std::iter::once("featsel").chain(args.iter().copied()))
}

fn out_dir(tmp: &tempfile::TempDir, name: &str) -> PathBuf {
    tmp.path().join(name)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(featsel(&["--help"]), 0);
    assert_eq!(featsel(&["--version"]), 0);
    assert_eq!(featsel(&["rank", "--help"]), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(featsel(&[]), 1);
    assert_eq!(featsel(&["rank", "--method", "nope"]), 1);
    assert_eq!(featsel(&["frobnicate"]), 1);
    // no --data
    assert_eq!(featsel(&["rank"]), 1);
}

#[test]
fn missing_file_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "o");
    let code = featsel(&["rank", "--data", "/nonexistent/x.csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn unknown_label_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "o");
    let data = fixture("penguins.csv");
    let code = featsel(&[
        "rank",
        "--data",
        &data,
        "--label",
        "nope",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn lasso_on_three_classes_needs_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "o");
    let data = fixture("penguins.csv");
    let base = [
        "lasso",
        "--data",
        &data,
        "--label",
        "species",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(featsel(&base), 1);
    let mut with = base.to_vec();
    with.extend(["--classes", "Adelie,Gentoo"]);
    assert_eq!(featsel(&with), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("lasso.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["subcommand"], "lasso");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(fs::read_to_string(out.join("lasso_coefficients.csv"))
        .unwrap()
        .starts_with("feature,beta,abs_beta,C\n"));
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let data = fixture("penguins.csv");
    let cases: &[&[&str]] = &[
        &["rank", "--method", "relieff"],
        &["rank", "--method", "rf", "--trees", "20"],
        &["wrap", "--strategy", "sfs"],
        &["forest", "--trees", "20"],
        &["cfs"],
        &["pca"],
        &["lda"],
        &["tree"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let dirs: Vec<PathBuf> = (0..2).map(|r| out_dir(&tmp, &format!("{i}_{r}"))).collect();
        for d in &dirs {
            let mut args = case.to_vec();
            args.extend(["--data", &data, "--label", "species", "--out", d.to_str().unwrap()]);
            assert_eq!(featsel(&args), 0, "{case:?}");
        }
        let mut names: Vec<_> = fs::read_dir(&dirs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            // the output directory itself is echoed into the config
            let a = fs::read_to_string(dirs[0].join(&n)).unwrap();
            let b = fs::read_to_string(dirs[1].join(&n)).unwrap();
            let b = b.replace(dirs[1].to_str().unwrap(), dirs[0].to_str().unwrap());
            assert!(a == b, "{case:?} {n:?} differs between runs");
        }
    }
}

#[test]
fn wrap_report_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "w");
    let data = fixture("penguins.csv");
    let code = featsel(&[
        "wrap",
        "--strategy",
        "exhaustive",
        "--data",
        &data,
        "--label",
        "species",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("wrap.json")).unwrap()).unwrap();
    let r = &v["result"];
    assert_eq!(r["stopping_rule"], "exhaustive");
    assert!(r["train_cv"].as_f64().unwrap() > 0.9);
    assert!(!r["selected_names"].as_array().unwrap().is_empty());
    // 15 non-empty subsets of 4 features
    let trace = fs::read_to_string(out.join("wrap_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 16);
    assert!(trace.starts_with("step,subset_bitmask_hex,cv_accuracy\n"));
}

#[test]
fn demo_curse_writes_one_row_per_dim() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "d");
    assert_eq!(
        featsel(&[
            "demo",
            "curse",
            "--dims",
            "2,8",
            "--points",
            "200",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let csv = fs::read_to_string(out.join("curse.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
