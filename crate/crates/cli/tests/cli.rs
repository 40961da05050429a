use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gwl4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwl4")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = gwl4(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn value(v: &Value) -> f64 {
    v["value"].as_f64().expect("numeric value")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn invariant_of_round_products() {
    let s4 = json(&["invariant", "--spec", "product[4:1]"]);
    assert!(close(value(&s4), 64.0 * PI * PI, 1e-12));
    assert_eq!(s4["values"]["closed_form"], "64π²");
    assert!(close(s4["values"]["l4"].as_f64().unwrap(), PI * PI, 1e-12));

    let t4 = json(&["invariant", "--shape", "product", "--profile", "1:1,1:1,1:1,1:1"]);
    assert!(close(value(&t4), 24.0 * PI.powi(4), 1e-12));

    let a = value(&json(&["invariant", "--spec", "product[3:1,1:0.5]"]));
    let b = value(&json(&["invariant", "--spec", "product[3:2,1:1]"]));
    assert!(close(a, b, 1e-13), "{a} vs {b}");

    // Quadrature agrees with the closed form.
    let q = json(&["invariant", "--spec", "product[3:1,1:0.5]", "--quadrature"]);
    assert!(close(value(&q), a, 1e-10));
}

#[test]
fn invariant_in_curved_ambients() {
    let r = json(&["invariant", "--spec", "sphere@round-sphere:5"]);
    assert!(r["values"]["ll4"].is_null());
    assert!(close(value(&r), PI * PI, 1e-8));
    let c = json(&["invariant", "--spec", "sphere@conformal-flat:sin1", "--counts", "16,1,1,1"]);
    assert!(close(value(&c), PI * PI, 1e-6));
}

#[test]
fn search_finds_both_three_one_products() {
    let v = json(&["search", "--profile", "3,1"]);
    let roots = v["values"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    let r: Vec<f64> = roots.iter().map(|c| c["radii"][1].as_f64().unwrap()).collect();
    assert!(close(r[0], 1.0 / 3f64.sqrt(), 1e-8));
    assert!(close(r[1], 0.6f64.sqrt(), 1e-8));
    assert_eq!(roots[0]["closed_form"], "18√3π³");
    let table = String::from_utf8(gwl4(&["search", "--profile", "3,1"]).stdout).unwrap();
    assert!(table.contains("0.577350") && table.contains("0.774597"), "{table}");
}

#[test]
fn pointwise_coefficients_on_the_unit_sphere() {
    let v4 = json(&["expand", "--spec", "sphere", "--coefficient", "v4"]);
    assert!(close(value(&v4), 0.375, 1e-12));
    let u4 = json(&["expand", "--spec", "sphere", "--coefficient", "u4"]);
    assert!(close(value(&u4), -0.125, 1e-12));
    let u2 = json(&["expand", "--spec", "sphere", "--coefficient", "u2", "--point", "0.3,0.2,1,-2"]);
    assert!(close(value(&u2), -0.5, 1e-12));
    let plane = json(&["expand", "--shape", "builtin-chart", "--family", "plane", "--coefficient", "u2"]);
    assert_eq!(value(&plane), 0.0);
    let w2 = json(&["expand", "--spec", "sphere{dim=2;radius=2}", "--coefficient", "w2"]);
    assert!(value(&w2).abs() < 1e-12);
}

#[test]
fn renormalized_volume_anomalies() {
    let l4 = json(&["renvol"]);
    assert!((value(&l4) - PI * PI).abs() < 1e-3);
    let l2 = json(&["renvol", "--n", "2", "--radius", "3"]);
    assert!((value(&l2) + 2.0 * PI).abs() < 1e-3);
}

#[test]
fn residual_vanishes_only_at_critical_shapes() {
    let crit = json(&["residual", "--spec", "product[3:1,1:0.5773502691896258]"]);
    assert!(value(&crit) < 1e-12);
    let off = json(&["residual", "--spec", "product[3:1,1:0.5]"]);
    assert!(value(&off) > 1.0);
    let chart = json(&["residual", "--spec", "sphere{radius=2}"]);
    assert!(value(&chart) < 1e-10);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| gwl4(args).status.code();
    assert_eq!(code(&["invariant", "--spec", "torus"]), Some(2));
    assert_eq!(code(&["invariant", "--spec", "product[2:1,1:1]"]), Some(2));
    assert_eq!(code(&["invariant", "--spec", "product[4:1]", "--json", "--csv"]), Some(2));
    assert_eq!(code(&["invariant"]), Some(2));
    assert_eq!(code(&["residual", "--spec", "sphere@round-sphere:5"]), Some(2));
    assert_eq!(code(&["renvol", "--n", "3"]), Some(2));
    // A parameter point on the polar axis of the chart degenerates.
    assert_eq!(code(&["expand", "--spec", "sphere", "--coefficient", "u4", "--point", "0,0.5,1,1"]), Some(3));
    let out = gwl4(&["invariant", "--spec", "torus"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown chart family"));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shape.json");
    std::fs::write(&path, r#"{"shape": "builtin-chart", "family": "ellipsoid", "params": {"axes": [1, 1, 1, 1, 1.2]}}"#).unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&["invariant", "--config", p, "--grid", "6"]);
    let from_flags = json(&[
        "invariant", "--shape", "builtin-chart", "--family", "ellipsoid", "--param", "axes=1,1,1,1,1.2", "--grid", "6",
    ]);
    assert_eq!(from_file["values"], from_flags["values"]);
    std::fs::write(&path, r#"{"shape": "product", "profile": "4:1", "colour": "red"}"#).unwrap();
    assert_eq!(gwl4(&["invariant", "--config", p]).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_gwl4"))
            .args(["invariant", "--spec", "wavy-sphere", "--grid", "6", "--json"])
            .env("GW_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

fn golden(name: &str, args: &[&str]) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let got = gwl4(args);
    assert!(got.status.success());
    if std::env::var_os("GW_BLESS").is_some() {
        std::fs::write(&path, &got.stdout).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(String::from_utf8_lossy(&got.stdout), String::from_utf8_lossy(&want), "{name}");
}

#[test]
fn golden_outputs() {
    golden("invariant_s4.json", &["invariant", "--spec", "product[4:1]", "--json"]);
    golden("search_2_1_1.json", &["search", "--profile", "2,1,1", "--json"]);
    golden("expand_u4.csv", &["expand", "--spec", "sphere{radius=2}", "--coefficient", "u4", "--csv"]);
    golden("residual_s3s1.txt", &["residual", "--spec", "product[3:1,1:1]"]);
}
