//! End-to-end runs of the `ctximpute` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctximpute")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, out: &str) -> String {
    let cfg = format!(
        r#"seed = 11
output_dir = "{out}"
imputers = [{{ method = "mean" }}, {{ method = "knn", k = 3 }}]

[dataset]
bundled = "iris"

[evaluation]
repetitions = 3
"#
    );
    let p = dir.join(format!("{out}.toml"));
    fs::write(&p, cfg).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn run_all_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let cfg = write_config(dir.path(), out);
        let o = bin(&["run-all", "--config", &cfg]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f == "mnar/records_specific.jsonl"));
    for f in files {
        let f = f.as_str().unwrap();
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn external_imputation_enters_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let masked = path(d, "masked.csv");
    let filled = path(d, "filled.csv");
    assert!(bin(&["inject", "--dataset", "wine", "--mechanism", "mnar", "--seed", "0", "--out", &masked]).status.success());
    assert!(bin(&["impute", "--in", &masked, "--dataset", "wine", "--method", "knn", "--k", "7", "--out", &filled])
        .status
        .success());
    let spec = path(d, "spec.toml");
    fs::write(
        &spec,
        "seed = 3\nrepetitions = 2\nimputers = [{ method = \"mean\" }]\n[dataset]\nbundled = \"wine\"\n[missingness]\nmechanism = \"mnar\"\n",
    )
    .unwrap();
    let o = bin(&[
        "evaluate", "--spec", &spec, "--format", "csv", "--imputed", &format!("knn7={filled}"), "--incomplete", &masked,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("imputer,runs,failed,proxy_mean"));
    assert!(csv.lines().any(|l| l.starts_with("knn7,")), "{csv}");
    assert!(csv.lines().any(|l| l.starts_with("mean,2,0,")), "{csv}");
}

#[test]
fn tune_k_prints_a_grid_value() {
    let dir = tempfile::tempdir().unwrap();
    let masked = path(dir.path(), "m.csv");
    assert!(bin(&["inject", "--dataset", "iris", "--mechanism", "mcar", "--seed", "5", "--out", &masked]).status.success());
    let o = bin(&["tune-k", "--in", &masked, "--dataset", "iris", "--grid", "3,5,7", "--seed", "1"]);
    assert!(o.status.success());
    let k: usize = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!([3, 5, 7].contains(&k));
}

#[test]
fn train_fitted_transform() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (train, eval, out) = (path(d, "train.csv"), path(d, "eval.csv"), path(d, "out.csv"));
    assert!(bin(&["inject", "--dataset", "iris", "--mechanism", "mcar", "--seed", "1", "--out", &train]).status.success());
    assert!(bin(&["inject", "--dataset", "iris", "--mechanism", "mcar", "--seed", "2", "--out", &eval]).status.success());
    let o = bin(&["impute", "--in", &eval, "--dataset", "iris", "--method", "chained", "--train", &train, "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 151);
    assert!(!text.contains(",,"));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["inject"]).status.code(), Some(1));
    assert_eq!(bin(&["validate", "--dataset", "no-such-set"]).status.code(), Some(2));
    // unreachable endpoint
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ctximpute"))
        .args(["descriptors", "--dataset", "wine", "--cache-dir", &path(dir.path(), "cache")])
        .env("CTXIMPUTE_ENDPOINT_URL", "http://127.0.0.1:9/v1/chat/completions")
        .env("CTXIMPUTE_MODEL", "m")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    // offline ignores the endpoint
    let o = Command::new(env!("CARGO_BIN_EXE_ctximpute"))
        .args(["descriptors", "--dataset", "wine", "--offline"])
        .env("CTXIMPUTE_ENDPOINT_URL", "http://127.0.0.1:9/v1/chat/completions")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("Malic acid quantity missing"));
}
