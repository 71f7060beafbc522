//! Drives the `skewinfo` binary on files in a temporary directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use skewinfo::detect::isotropic_state;
use skewinfo::qstate::io::{write_bipartite, write_density};
use skewinfo::qstate::random::{random_mixed, random_pure};
use skewinfo::qstate::{BipartiteState, DensityMatrix};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewinfo")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn density(&self, name: &str, rho: &DensityMatrix) -> PathBuf {
        let path = self.path(name);
        write_density(&path, rho).unwrap();
        path
    }

    fn bipartite(&self, name: &str, st: &BipartiteState) -> PathBuf {
        let path = self.path(name);
        write_bipartite(&path, st).unwrap();
        path
    }

    fn text(&self, name: &str, body: &str) -> PathBuf {
        let path = self.path(name);
        std::fs::write(&path, body).unwrap();
        path
    }
}

fn routes(v: &Value) -> [f64; 3] {
    ["q_basis", "q_spectral", "q_tilde"].map(|k| v[k].as_f64().unwrap())
}

#[test]
fn uncertainty_examples() {
    let ws = Workspace::new();
    let mixed = ws.density("mixed.json", &DensityMatrix::maximally_mixed(3).unwrap());
    let out = run(&["uncertainty", "--state", p(&mixed), "--f", "wy"]);
    assert_eq!(code(&out), 0);
    for q in routes(&json(&out)) {
        assert!(q.abs() < 1e-9);
    }

    let pure = ws.density("pure.json", &random_pure(3, 4));
    let out = run(&["uncertainty", "--state", p(&pure), "--f", "sld"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    for q in routes(&v) {
        assert!((q - 3.0).abs() < 1e-9);
    }
    assert_eq!(v["within_bounds"], Value::Bool(true));
    assert_eq!(v["upper_bound"].as_f64(), Some(3.0));

    let diag = ws.density("diag.json", &DensityMatrix::diagonal(&[0.7, 0.3]).unwrap());
    let out = run(&["uncertainty", "--state", p(&diag), "--f", "wy"]);
    let v = json(&out);
    // 2 - (sqrt 0.7 + sqrt 0.3)^2
    let expected = 2.0 - (0.7f64.sqrt() + 0.3f64.sqrt()).powi(2);
    for q in routes(&v) {
        assert!((q - expected).abs() < 1e-12);
        assert!((q - 0.0834849).abs() < 1e-7);
    }
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-12);
    let s = -(0.7f64 * 0.7f64.ln() + 0.3 * 0.3f64.ln());
    assert!((v["entropy"].as_f64().unwrap() - s).abs() < 1e-12);
    assert!((v["total_variance"].as_f64().unwrap() - (2.0 - 0.58)).abs() < 1e-12);
}

#[test]
fn uncertainty_errors() {
    let ws = Workspace::new();
    let garbage = ws.text("garbage.json", "{ not json");
    let out = run(&["uncertainty", "--state", p(&garbage), "--f", "wy"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let missing = ws.path("missing.json");
    assert_eq!(code(&run(&["uncertainty", "--state", p(&missing), "--f", "wy"])), 2);

    let negative = ws.text("neg.json", r#"{"dim": 2, "entries": [[1.2, 0], [0, 0], [0, 0], [-0.2, 0]]}"#);
    assert_eq!(code(&run(&["uncertainty", "--state", p(&negative), "--f", "wy"])), 3);

    let trace = ws.text("trace.json", r#"{"dim": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.6, 0]]}"#);
    assert_eq!(code(&run(&["uncertainty", "--state", p(&trace), "--f", "wy"])), 3);

    let skew = ws.text("herm.json", r#"{"dim": 2, "entries": [[0.5, 0], [0.1, 0], [0.2, 0], [0.5, 0]]}"#);
    assert_eq!(code(&run(&["uncertainty", "--state", p(&skew), "--f", "wy"])), 3);

    let ok = ws.density("ok.json", &DensityMatrix::maximally_mixed(2).unwrap());
    assert_eq!(code(&run(&["uncertainty", "--state", p(&ok), "--f", "wyd:1.5"])), 2);
    assert_eq!(code(&run(&["uncertainty", "--state", p(&ok), "--f", "nope"])), 2);
}

#[test]
fn detect_examples() {
    let ws = Workspace::new();
    let iso = ws.bipartite("iso.json", &isotropic_state(0.7, 3).unwrap());
    let out = run(&["detect", "--state", p(&iso), "--dims", "3,3", "--f", "sld"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "entangled");
    assert_eq!(v["threshold"].as_f64(), Some(4.0));
    let measures = v["measures"].as_array().unwrap();
    let f_hat = measures.iter().find(|m| m["measure_name"] == "f_hat").unwrap();
    assert!((f_hat["value"].as_f64().unwrap() - 4.2609).abs() < 5e-4);
    assert_eq!(f_hat["verdict"], "entangled");
    let v_hat = measures.iter().find(|m| m["measure_name"] == "v_hat").unwrap();
    assert_eq!(v_hat["spec_name"], "variance");
    assert_eq!(v_hat["verdict"], "inconclusive");

    let prod = BipartiteState::product(&random_mixed(1, 3), &random_mixed(2, 3)).unwrap();
    let prod = ws.bipartite("prod.json", &prod);
    let v = json(&run(&["detect", "--state", p(&prod), "--dims", "3,3", "--f", "wy"]));
    assert_eq!(v["verdict"], "product");
    let f_bar = &v["measures"][0];
    assert_eq!(f_bar["measure_name"], "f_bar");
    assert!(f_bar["value"].as_f64().unwrap().abs() <= 1e-8);

    let rect = BipartiteState::new(random_mixed(4, 6), 2, 3).unwrap();
    let rect = ws.bipartite("rect.json", &rect);
    let out = run(&["detect", "--state", p(&rect), "--dims", "2,3", "--f", "sld"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["measures"].as_array().unwrap().len(), 1);
    assert!(v["note"].as_str().unwrap().contains("m = n"));
    assert_eq!(v["verdict"], "correlated");
}

#[test]
fn detect_dimension_errors() {
    let ws = Workspace::new();
    let iso = ws.bipartite("iso.json", &isotropic_state(0.5, 3).unwrap());
    assert_eq!(code(&run(&["detect", "--state", p(&iso), "--dims", "2,4", "--f", "sld"])), 2);
    assert_eq!(code(&run(&["detect", "--state", p(&iso), "--dims", "3", "--f", "sld"])), 2);
    // a file's own dims are overridden by the flag
    assert_eq!(code(&run(&["detect", "--state", p(&iso), "--dims", "1,9", "--f", "sld"])), 0);
}

#[test]
fn sweep_examples_and_determinism() {
    let ws = Workspace::new();
    let cfg = ws.text(
        "cfg.json",
        r#"{"family": "isotropic", "dim": 3, "param_grid": {"start": 0, "stop": 1, "step": 0.1},
            "specs": ["sld"], "outputs": ["f_hat", "v_hat"]}"#,
    );
    let a = ws.path("a.csv");
    let b = ws.path("b.csv");
    assert_eq!(code(&run(&["sweep", "--config", p(&cfg), "--out", p(&a)])), 0);
    assert_eq!(code(&run(&["sweep", "--config", p(&cfg), "--out", p(&b)])), 0);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["param", "f_hat:sld", "v_hat", "verdict"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 11);
    let row = &rows[7];
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.7);
    assert!((row[1].parse::<f64>().unwrap() - 4.26087).abs() < 1e-5);
    assert!((row[2].parse::<f64>().unwrap() - 6.26667).abs() < 1e-5);
    assert_eq!(&row[3], "entangled");

    let single = ws.text(
        "single.json",
        r#"{"family": "isotropic", "dim": 3, "param_grid": {"start": 0.4, "stop": 0.4, "step": 0.1},
            "specs": ["wy", "sld"], "outputs": ["f_hat"]}"#,
    );
    let out = ws.path("single.csv");
    assert_eq!(code(&run(&["sweep", "--config", p(&single), "--out", p(&out)])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("param,f_hat:wy,f_hat:sld,verdict"));
}

#[test]
fn sweep_rejects_bad_configs() {
    let ws = Workspace::new();
    let out = ws.path("out.csv");
    for (k, body) in [
        r#"{"family": "isotropic", "dim": 3, "param_grid": {"start": 1, "stop": 0, "step": 0.1}, "specs": ["sld"], "outputs": []}"#,
        r#"{"family": "isotropic", "dim": 3, "param_grid": {"start": 0, "stop": 1, "step": -0.1}, "specs": ["sld"], "outputs": []}"#,
        r#"{"family": "isotropic", "dim": 1, "param_grid": {"start": 0, "stop": 1, "step": 0.1}, "specs": ["sld"], "outputs": []}"#,
        r#"{"family": "werner", "dim": 3, "param_grid": {"start": 0, "stop": 1, "step": 0.1}, "specs": ["sld"], "outputs": []}"#,
        r#"{"family": "isotropic", "dim": 3, "param_grid": {"start": 0, "stop": 1, "step": 0.1}, "specs": ["wyd:2"], "outputs": []}"#,
        "[]",
    ]
    .iter()
    .enumerate()
    {
        let cfg = ws.text(&format!("bad{k}.json"), body);
        assert_eq!(code(&run(&["sweep", "--config", p(&cfg), "--out", p(&out)])), 2, "{body}");
    }
}

#[test]
fn selftest_exit_codes() {
    let a = run(&["selftest", "--seed", "42"]);
    assert_eq!(code(&a), 0);
    let b = run(&["selftest", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for suite in ["specfun", "qstate", "measures", "detect", "io"] {
        assert!(text.contains(suite), "{text}");
    }
    assert_eq!(code(&run(&["selftest", "--seed", "42", "--inject-fault", "broken-mean"])), 1);
    assert_eq!(code(&run(&["selftest", "--seed", "7"])), 0);
    assert_eq!(code(&run(&["selftest"])), 2);
}
