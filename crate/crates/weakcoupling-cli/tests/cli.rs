use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakcoupling"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn vs_spectrum_top_eigenvalue_for_the_sphere_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["vs-spectrum", "--override", "potential.dim=3", "--override", "sphere.order=16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("vs_spectrum.json"));
    let top = v["data"]["top"][0][0].as_f64().unwrap();
    assert!((top - (1.0 - (-4.0 * PI).exp())).abs() < 1e-6, "{top}");
    let csv = std::fs::read_to_string(dir.path().join("vs_spectrum.csv")).unwrap();
    assert!(csv.starts_with("# config_hash="));
}

#[test]
fn manifest_records_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["norms"]);
    assert!(out.status.success());
    let m = read_json(&dir.path().join("manifest.json"));
    let n = read_json(&dir.path().join("norms.json"));
    let hash = m["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(n["config_hash"].as_str().unwrap(), hash);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["command"], "norms");
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "[potential]\nmodel = \"ball\"\ndim = 3\nradius = 1.0\n").unwrap();
    let out = run(dir.path(), &["norms", "--config", cfg.to_str().unwrap(), "--override", "potential.radius=2.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["config"]["potential"]["model"], "ball");
    assert_eq!(m["config"]["potential"]["radius"].as_f64(), Some(2.0));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[potential]\nmystery = 1\n").unwrap();
    assert_eq!(run(dir.path(), &["norms", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["norms", "--override", "potential.model=\"cube\""]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["vs-spectrum", "--override", "sphere.order=2"]).status.code(), Some(2));
}

#[test]
fn fitting_an_empty_curve_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    std::fs::write(&curve, "e,lambda,index,value,residual\n").unwrap();
    let out = run(dir.path(), &["fit", "--override", &format!("fit.curve=\"{}\"", curve.display())]);
    assert_eq!(out.status.code(), Some(2));
    let err = read_json(&dir.path().join("error.json"));
    assert_eq!(err["data"]["kind"], "config");
}

#[test]
fn oversized_dense_oracle_exceeds_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["oracle-compare", "--override", "grid.n=128", "--override", "grid.l=24.0"]);
    assert_eq!(out.status.code(), Some(4));
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["status"], "resolution");
}

#[test]
fn oracle_compare_agrees_on_a_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["oracle-compare", "--override", "grid.n=16", "--override", "grid.l=12.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("oracle_compare.json"));
    assert!(v["data"]["max_relative_gap"].as_f64().unwrap() < 1e-8);
}

#[test]
fn artifacts_do_not_depend_on_the_thread_count() {
    let args = [
        "bs-curve",
        "--override",
        "grid.n=64",
        "--override",
        "grid.l=20.0",
        "--override",
        "grid.resolvent=\"continuum_low\"",
        "--override",
        "curve.lambdas=[0.25, 0.18]",
    ];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut four = args.to_vec();
    four.extend(["--threads", "4"]);
    assert!(run(a.path(), &one).status.success());
    assert!(run(b.path(), &four).status.success());
    for name in ["curve_j1.csv", "curve.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    assert_eq!(read_json(&b.path().join("manifest.json"))["threads"], 4);
}
