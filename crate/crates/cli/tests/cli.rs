use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn quatgin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatgin"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("QG_SEED")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn spectrum_row_count_and_energy() {
    let dir = TempDir::new().unwrap();
    let out = quatgin(dir.path(), &["spectrum", "--n", "300", "--replicas", "20", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("re,im,weight"));
    assert_eq!(text.lines().count(), 1 + 20 * 600);
    let summary = read_json(&dir.path().join("summary.json"));
    let e = summary["mean_energy"].as_f64().unwrap();
    assert!((e - 0.75).abs() <= 0.02, "mean energy {e}");
}

#[test]
fn spectrum_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        assert!(quatgin(d.path(), &["spectrum", "--n", "30", "--replicas", "4", "--seed", "11"]).status.success());
    }
    let read = |d: &TempDir| fs::read(d.path().join("spectrum.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn seed_falls_back_to_environment() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert!(quatgin(a.path(), &["spectrum", "--n", "10", "--replicas", "2", "--seed", "5"]).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_quatgin"))
        .arg("--out")
        .arg(b.path())
        .args(["spectrum", "--n", "10", "--replicas", "2"])
        .env("QG_SEED", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
    let read = |d: &TempDir| fs::read(d.path().join("spectrum.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn mcmc_acceptance_rate_is_moderate() {
    let dir = TempDir::new().unwrap();
    let out = quatgin(dir.path(), &["mcmc", "--n", "16", "--steps", "200000"]);
    assert!(out.status.success());
    let summary = read_json(&dir.path().join("summary.json"));
    for key in ["n", "V", "steps", "acceptance_rate", "mean_energy"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    let rate = summary["acceptance_rate"].as_f64().unwrap();
    assert!(rate > 0.1 && rate < 0.9, "rate {rate}");
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("step,point_index,re,im,accepted"));
    assert_eq!(trace.lines().count(), 200_001);
}

#[test]
fn mcmc_rejects_non_symmetric_quadratic() {
    let dir = TempDir::new().unwrap();
    let out = quatgin(dir.path(), &["mcmc", "--n", "4", "--steps", "10", "--potential", "0.5,1,1"]);
    assert!(!out.status.success());
}

#[test]
fn potential_table_for_nu() {
    let dir = TempDir::new().unwrap();
    assert!(quatgin(dir.path(), &["potential-table", "--measure", "nu", "--grid", "64"]).status.success());
    let path = dir.path().join("potential.csv");
    assert!(fs::read_to_string(&path).unwrap().starts_with("re,im,U_closed,U_quad,abs_err\n"));
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 64 * 64);
    let worst = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    assert!(worst <= 1e-5, "max abs_err {worst}");
}

#[test]
fn classes_canonical_columns_match() {
    let dir = TempDir::new().unwrap();
    assert!(quatgin(dir.path(), &["classes", "--n", "300"]).status.success());
    let path = dir.path().join("classes.csv");
    assert!(fs::read_to_string(&path).unwrap().starts_with("re,im,w,x,y,z,weight\n"));
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 300);
    for r in rows {
        assert_eq!(r[0], r[2]);
        let im = (r[3] * r[3] + r[4] * r[4] + r[5] * r[5]).sqrt();
        assert!((r[1] - im).abs() <= 1e-10);
    }
    let report = read_json(&dir.path().join("report.json"));
    assert!(report["max_canonical_defect"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn verify_only_potentials() {
    let dir = TempDir::new().unwrap();
    let out = quatgin(dir.path(), &["verify", "--only", "potentials"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report = read_json(&dir.path().join("verify.json"));
    let rows = report.as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["criterion"], 1);
        for key in ["test_name", "n", "replicas", "measured", "tolerance", "pass"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
        assert_eq!(row["pass"], true);
    }
}

#[test]
fn verify_rejects_unknown_group() {
    let dir = TempDir::new().unwrap();
    assert!(!quatgin(dir.path(), &["verify", "--only", "bogus"]).status.success());
}
