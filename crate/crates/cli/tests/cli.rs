use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn declab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_declab")).args(args).output().expect("run declab")
}

fn ok(args: &[&str]) -> Output {
    let out = declab(args);
    assert!(out.status.success(), "declab {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn out_dir(tmp: &TempDir, name: &str) -> String {
    tmp.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn measure_balanced_qubit() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "m");
    ok(&["measure", "--K", "2", "--M", "16", "--out", &dir]);
    let rows = csv_rows(&Path::new(&dir).join("measure.csv"));
    let get = |kind: &str| rows.iter().find(|r| r[0] == kind).unwrap().clone();
    let value = |r: &[String], i: usize| r[i].parse::<f64>().unwrap();
    let (exact, reduced, initial) = (get("exact"), get("reduced"), get("initial"));
    assert!((value(&exact, 4) - 2.0).abs() < 1e-9 && (value(&exact, 5) - 1.0).abs() < 1e-9);
    assert!((value(&reduced, 4) - 1.0).abs() < 1e-9 && (value(&reduced, 5) - 1.0).abs() < 1e-9);
    assert_eq!(value(&initial, 4), 0.0);
    let meta = json(&Path::new(&dir).join("measure.run.json"));
    assert_eq!(meta["command"], "measure");
    assert_eq!(meta["config"]["sources"]["K"], "flag");
    assert_eq!(meta["config"]["sources"]["seed"], "default");
    assert!(fs::read_to_string(Path::new(&dir).join("measure.svg")).unwrap().starts_with("<!-- declab "));
}

#[test]
fn single_outcome_has_no_correlation() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "k1");
    ok(&["measure", "--K", "1", "--M", "1,4", "--out", &dir, "--format", "csv"]);
    for row in csv_rows(&Path::new(&dir).join("measure.csv")) {
        assert_eq!(&row[4..7], ["0", "0", "0"], "{row:?}");
    }
    assert!(!Path::new(&dir).join("measure.json").exists());
}

#[test]
fn same_seed_gives_identical_files() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (out_dir(&tmp, "a"), out_dir(&tmp, "b"));
    for dir in [&a, &b] {
        ok(&["gap", "--trials", "6", "--seed", "7", "--format", "csv,json", "--out", dir]);
        ok(&["decoherence", "--M", "10,100", "--trials", "40", "--seed", "7", "--out", dir]);
    }
    for name in ["gap.csv", "gap.json", "decoherence_draws.csv", "decoherence_summary.csv", "decoherence.svg"] {
        let (x, y) = (fs::read(Path::new(&a).join(name)).unwrap(), fs::read(Path::new(&b).join(name)).unwrap());
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "p");
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 11\nM = [5, 50]\ntrials = 30\nobservable = \"sigma-x\"\n").unwrap();
    ok(&["decoherence", "--config", cfg.to_str().unwrap(), "--trials", "35", "--out", &dir]);
    let meta = json(&Path::new(&dir).join("decoherence.run.json"));
    let config = &meta["config"];
    assert_eq!(config["seed"], 11);
    assert_eq!(config["M"], serde_json::json!([5, 50]));
    assert_eq!(config["trials"], 35);
    assert_eq!(config["sources"]["trials"], "flag");
    assert_eq!(config["sources"]["M"], "config");
    assert_eq!(config["sources"]["phases"], "default");
    assert_eq!(csv_rows(&Path::new(&dir).join("decoherence_draws.csv")).len(), 70);
}

#[test]
fn empty_config_applies_defaults() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "e");
    let cfg = tmp.path().join("empty.toml");
    fs::write(&cfg, "").unwrap();
    ok(&["measure", "--config", cfg.to_str().unwrap(), "--out", &dir]);
    let meta = json(&Path::new(&dir).join("measure.run.json"));
    assert_eq!(meta["config"]["M"], serde_json::json!([16]));
    assert_eq!(meta["config"]["sources"]["M"], "default");
}

#[test]
fn bad_input_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "x");
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "sorce = \"exact\"\n").unwrap();
    let out = declab(&["gap", "--config", cfg.to_str().unwrap(), "--out", &dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sorce"));
    assert!(!declab(&["measure", "--K", "2", "--c", "1,1", "--out", &dir]).status.success());
    assert!(!declab(&["measure", "--M", "0", "--out", &dir]).status.success());
}

#[test]
fn validate_passes_and_fault_fails_only_scaling() {
    let tmp = TempDir::new().unwrap();
    let out = ok(&["validate", "--out", &out_dir(&tmp, "v")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));

    let dir = out_dir(&tmp, "f");
    let out = declab(&["validate", "--inject-fault", "aligned-phases", "--out", &dir]);
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<String> = csv_rows(&Path::new(&dir).join("validate.csv"))
        .into_iter()
        .filter(|r| r[1] == "FAIL")
        .map(|r| r[0].clone())
        .collect();
    assert_eq!(failed, ["decoherence scaling"]);
}

#[test]
fn gap_of_product_and_reduced_states() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "g");
    ok(&["gap", "--source", "product", "--trials", "6", "--out", &dir, "--format", "csv"]);
    for row in csv_rows(&Path::new(&dir).join("gap.csv")) {
        let (s, i): (f64, f64) = (row[6].parse().unwrap(), row[7].parse().unwrap());
        assert!(s.abs() < 1e-9 && i.abs() < 1e-9, "{row:?}");
    }
    ok(&["gap", "--source", "reduced", "--strategy", "pointer-exact", "--out", &dir, "--format", "csv"]);
    for row in csv_rows(&Path::new(&dir).join("gap.csv")) {
        assert!(row[8].parse::<f64>().unwrap().abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn counterexample_replays() {
    use declab_core::dynamics::{evaluate_trajectory, Step};
    use declab_core::{CMatrix, CVector, C64};

    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "c");
    ok(&["counterexample", "--seed", "3", "--out", &dir]);
    let doc = json(&Path::new(&dir).join("counterexample.json"));
    assert_eq!(doc["found"], true);
    let pair = |v: &Value| C64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap());
    let initial: Vec<C64> = doc["initial"].as_array().unwrap().iter().map(pair).collect();
    let steps: Vec<Step> = doc["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let q = s["qubits"].as_array().unwrap();
            let u = s["unitary"].as_array().unwrap();
            Step {
                qubits: (q[0].as_u64().unwrap() as usize, q[1].as_u64().unwrap() as usize),
                unitary: CMatrix::from_fn(4, 4, |i, j| pair(&u[i][j])),
            }
        })
        .collect();
    let (t1, t2) = (doc["t1"].as_u64().unwrap() as usize, doc["t2"].as_u64().unwrap() as usize);
    // independent search seed and a larger budget
    let points = evaluate_trajectory(&CVector::from_vec(initial), &steps[..t2], 10, 99).unwrap();
    let values = [points[t1].clone(), points[t2].clone()].map(|p| (p.mutual_entropy, p.accessible_info));
    let (ds, di) = (values[1].0 - values[0].0, values[1].1 - values[0].1);
    assert!((ds - doc["delta_S_bits"].as_f64().unwrap()).abs() < 1e-9);
    assert!(ds * di < 0.0 && ds.abs() >= 0.01 && di.abs() >= 0.01, "ΔS = {ds}, ΔI = {di}");
}

#[test]
fn recurrence_writes_scan_and_summary() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "r");
    ok(&["recurrence", "--M", "2", "--trials", "3", "--horizon", "2000", "--points", "50", "--out", &dir]);
    let summary = csv_rows(&Path::new(&dir).join("recurrence_summary.csv"));
    assert_eq!(summary.len(), 3);
    let scan = csv_rows(&Path::new(&dir).join("recurrence_scan.csv"));
    assert!(scan.len() >= 150);
    assert!(scan.iter().all(|r| (0.0..=1.0).contains(&r[4].parse::<f64>().unwrap())));
    ok(&["recurrence", "--M", "3", "--trials", "2", "--energies", "commensurate", "--out", &dir, "--format", "csv"]);
    for row in csv_rows(&Path::new(&dir).join("recurrence_summary.csv")) {
        assert!(row[8].parse::<f64>().unwrap() < 1e-9, "{row:?}");
    }
}
