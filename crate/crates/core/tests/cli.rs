use std::path::Path;
use std::process::{Command, Output};

use overshoot::bounds::RationalRate;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overshoot"))
        .args(args)
        .output()
        .expect("failed to run the overshoot binary")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|line| line.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bound", "--kind", "c1-cos", "--L", "2"]).status.code(), Some(0));
    assert_eq!(run(&["bound", "--kind", "c1-cos", "--L", "1"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--kind", "c1-cos"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--N", "2", "--N1", "4"]).status.code(), Some(1));
    assert_eq!(run(&["opnorm", "--kernel", "sinc", "--L", "2"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("sweep.csv");
    let out = run(&[
        "sweep",
        "--l-min",
        "1.1",
        "--l-max",
        "1.2",
        "--step",
        "0.05",
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_json() {
    let out = run(&["bound", "--kind", "c2-new", "--n", "1", "--m", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["method"], "c2_new");
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn sweep_matches_golden() {
    let out = run(&["sweep", "--l-min", "1.05", "--l-max", "3.0", "--step", "0.05"]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/sweep.csv")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);

    let table = rows(&golden);
    assert_eq!(table.len(), 40);
    let at = |l: f64| table.iter().find(|r| (r[0] - l).abs() < 1e-9).unwrap();
    assert_eq!(at(2.0)[1], 1.41421356237);
    assert_eq!(at(2.0)[2], 1.41421356237);
    let r = at(1.25);
    assert!(r[4] < r[2] && r[2] < r[1]);
}

#[test]
fn sweep_improves_on_simple_rates() {
    // rates with m in {1/2, 1} never lose to the square-root bound up to L = 1.5
    let out = run(&["sweep", "--l-min", "1.01", "--l-max", "1.5", "--step", "0.01"]);
    let table = rows(&String::from_utf8(out.stdout).unwrap());
    let mut checked = 0;
    for r in table {
        let Some(rate) = RationalRate::from_oversampling(r[0], 64) else {
            continue;
        };
        if rate.m() <= 1.0 {
            assert!(r[4] <= r[2] + r[6], "L = {}: {} > {}", r[0], r[4], r[2]);
            checked += 1;
        }
    }
    assert!(checked >= 5);
}

#[test]
fn sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--l-min",
        "1.5",
        "--l-max",
        "2.0",
        "--step",
        "0.25",
        "--with-opnorm",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(table.len(), 3);
    // the wide trapezoid never exceeds its closed-form bound and meets it at L = 2
    for r in &table {
        assert!(r[5] <= r[3] + 1e-9, "{r:?}");
    }
    assert!((table[2][5] - table[2][3]).abs() < 1e-9);
}

#[test]
fn opnorm_trapezoid() {
    let out = run(&["opnorm", "--kernel", "trapezoid", "--leps", "3", "--L", "2"]);
    assert!(out.status.success());
    assert!((json(&out)["value"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-6);
}

#[test]
fn design_single_layer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("filter.json");
    let pi = std::f64::consts::PI;
    let spec = serde_json::json!({
        "breakpoints_rad": [pi, 3.0 * pi],
        "amplitudes": [1.0, 0.0],
        "extension_factors": [3.0],
    });
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = run(&["design", "--spec", path.to_str().unwrap(), "--L", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["bound"]["value"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
    assert!(v["isi"]["defect"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["layers"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "--N", "1", "--N1", "4", "--trials", "300", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["N"], 1);
    let lp = v["lp"]["value"].as_f64().unwrap();
    assert!((lp - std::f64::consts::SQRT_2).abs() < 1e-9);
    assert!(v["monte_carlo"]["ratio"].as_f64().unwrap() <= lp + 1e-9);
}
