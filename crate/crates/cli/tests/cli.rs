use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qbnf"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Small Gaussian run: one ħ, two ε, n_max 8.
fn base_config() -> Value {
    json!({
        "omega": { "omega1": [1.0, 1.0], "omega2": [1.0, -2.0] },
        "gamma": { "delta1": 0.1, "delta2": 10.0, "delta": 0.5 },
        "hbar": [0.1],
        "epsilon": [1e-3, 5e-4],
        "sigma": 1.0,
        "rho": 0.5,
        "perturbation": { "type": "gaussian", "amplitude": 0.1, "width": 0.5, "band_limit": 2 },
        "truncation": { "n_max": 8, "nu_max": 16, "grid_points": 32, "s_max": 10.0 },
        "order": 3,
        "output_dir": "unused",
        "seed": 7
    })
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_vec_pretty(cfg).unwrap()).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn shipped_configs_are_members() {
    let tmp = TempDir::new().unwrap();
    for name in ["gaussian.json", "polynomial.json"] {
        let o = run(&["check-gamma"], &repo_config(name), tmp.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["member"], true);
        assert!(report["c_delta"].as_f64().unwrap() > 0.0);
        assert_eq!(report["audit"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn real_parallel_frequencies_are_not_members() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["omega"] = json!({ "omega1": [1.0, 0.0], "omega2": [2.0, 0.0] });
    let o = run(&["check-gamma"], &write_config(tmp.path(), &cfg), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["member"], false);
    assert!(report["c_delta"].is_null());
}

#[test]
fn malformed_config_exits_2() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.json");
    fs::write(&path, "{\"omega\": 3}").unwrap();
    let o = run(&["check-gamma"], &path, tmp.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn field_level_message_for_bad_hbar() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["hbar"] = json!([0.1, 0.0]);
    let o = run(&["normal-form"], &write_config(tmp.path(), &cfg), tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("hbar[1]"), "{}", stderr(&o));
}

#[test]
fn unknown_suite_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &base_config());
    let o = run(&["verify", "--suite", "foo"], &cfg, tmp.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn small_truncation_exits_3() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["truncation"]["n_max"] = json!(4);
    cfg["order"] = json!(6);
    let o = run(&["normal-form"], &write_config(tmp.path(), &cfg), tmp.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("contamination"), "{}", stderr(&o));
}

#[test]
fn empty_epsilon_list_writes_series_only() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["epsilon"] = json!([]);
    let out = tmp.path().join("out");
    let o = run(&["normal-form"], &write_config(tmp.path(), &cfg), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("normal_form_hbar_1e-1.json").exists());
    assert!(!out.join("spectra.csv").exists());
}

#[test]
fn empty_sweep_grid_exits_2() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["epsilon"] = json!([]);
    let o = run(&["sweep"], &write_config(tmp.path(), &cfg), tmp.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn normal_form_outputs_carry_metadata() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["normal-form"], &write_config(tmp.path(), &base_config()), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let series: Value = serde_json::from_slice(&fs::read(out.join("normal_form_hbar_1e-1.json")).unwrap()).unwrap();
    let meta = &series["meta"];
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(meta["contamination_depth"], series["series"]["contamination_depth"]);
    assert_eq!(meta["truncation"]["n_max"], 8);
    assert!(meta["versions"]["qbnf"].is_string());

    let csv = fs::read_to_string(out.join("spectra.csv")).unwrap();
    assert!(csv.contains("# config_hash:"));
    let depth = &series["series"]["contamination_depth"];
    assert!(csv.contains(&format!("# contamination_depth: {depth}\n")));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n1,n2,eps,hbar,re_E,im_E,source");
    assert!(rows.iter().any(|r| r.ends_with(",series")));
    assert!(rows.iter().any(|r| r.ends_with(",diagonalization")));
}

#[test]
fn series_and_diagonalization_agree_in_the_csv() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["normal-form"], &write_config(tmp.path(), &base_config()), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("spectra.csv")).unwrap();
    let value = |source: &str| -> (f64, f64) {
        let row = csv
            .lines()
            .find(|l| l.starts_with("0,0,1e-3,") && l.ends_with(source))
            .unwrap();
        let f: Vec<&str> = row.split(',').collect();
        (f[4].parse().unwrap(), f[5].parse().unwrap())
    };
    let (a, b) = (value(",series"), value(",diagonalization"));
    assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-10, "{a:?} vs {b:?}");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &base_config());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = run(&["sweep"], &cfg, dir);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let o = run(&["verify", "--suite", "homological"], &cfg, dir);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (fa, fb) = (read_dir_bytes(&a), read_dir_bytes(&b));
    assert_eq!(fa.len(), 4);
    assert_eq!(fa, fb);
}

#[test]
fn sweep_reports_one_eps_star_across_hbar() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = base_config();
    cfg["hbar"] = json!([1.0, 0.1, 0.01]);
    cfg["epsilon"] = json!([1e-3]);
    cfg["labels"] = json!([[0, 0]]);
    let out = tmp.path().join("out");
    let o = run(&["sweep"], &write_config(tmp.path(), &cfg), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("radius.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[4] == rows[0][4]));
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &base_config());
    let o = bin()
        .args(["verify", "--suite", "denominators", "--seed", "99", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["meta"]["seed"], 99);
    assert_eq!(report["report"]["seed"], 99);
    assert_eq!(report["report"]["passed"], true);
}
