use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn flatmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatmod")).args(args).env_remove("FLATMOD_JOBS").output().expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = flatmod(&["verify", "--suite", "fox-symbolic", "--genus", "3", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["config"]["genus"], 3);
    assert!(r["records"].as_array().unwrap().iter().all(|x| x["reference"].as_str().is_some_and(|s| !s.is_empty())));
}

#[test]
fn identity_failure_exits_one() {
    let out = flatmod(&["verify", "--suite", "moment", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("moment.linear_part"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"N": 3, "r_list": [3], "sample_count": 2, "suites": ["cocycle"]}"#).unwrap();
    let out = flatmod(&["verify", "--config", cfg.to_str().unwrap(), "--samples", "3", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["config"]["N"], 3);
    assert_eq!(r["config"]["sample_count"], 3);
    assert!(r["records"].as_array().unwrap().iter().any(|x| x["identity_id"] == "cocycle.r3.delta_phi2"));
}

#[test]
fn bad_configuration_exits_two_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"N": 2, "sample_count": "many"}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "--config", bad.to_str().unwrap()],
        vec!["verify", "--config", "/nonexistent/cfg.json"],
        vec!["verify", "--suite", "nonsense"],
        vec!["verify", "--r", "4"],
        vec!["verify", "--samples", "0"],
        vec!["verify", "--genus", "1"],
        vec!["verify", "--fd-step", "-1e-5"],
    ];
    for mut args in cases {
        args.extend(["--out", report.to_str().unwrap()]);
        let out = flatmod(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!Path::new(&report).exists(), "{args:?}");
    }
}

#[test]
fn sampling() {
    let out = flatmod(&["sample", "--space", "Y", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), Value::Array(vec![]));

    let ys = json(&flatmod(&["sample", "--space", "Y", "--count", "5", "--seed", "1"]));
    assert_eq!(ys.as_array().unwrap().len(), 5);
    assert!(ys.as_array().unwrap().iter().all(|y| y["residual"].as_f64().unwrap() <= 1e-8));

    let xs = json(&flatmod(&["sample", "--space", "X", "--count", "5", "--N", "3"]));
    for x in xs.as_array().unwrap() {
        assert!(x["residual"].as_f64().unwrap() <= 1e-10);
        assert_eq!(x["lambda"].as_array().unwrap().len(), 3);
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn eval_omega_on_reduced_frame_is_skew_6x6() {
    let out = flatmod(&["eval", "--form", "omega", "--sample", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    for p in v["points"].as_array().unwrap() {
        let m = p["components"][0]["values"].as_array().unwrap();
        assert_eq!(m.len(), 6);
        let mut largest: f64 = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                let (x, _) = pair(&m[a][b]);
                let (y, _) = pair(&m[b][a]);
                assert!((x + y).abs() < 1e-12);
                largest = largest.max(x.abs());
            }
        }
        assert!(largest > 1e-3);
    }
}

#[test]
fn eval_a2_phi_gram_is_scaled_identity() {
    let v = json(&flatmod(&["eval", "--form", "a_2", "--sample", "1", "--phi", "basis", "--N", "3"]));
    let g = v["points"][0]["phi_gram"].as_array().unwrap();
    assert_eq!(g.len(), 8);
    let scale = -1.0 / (8.0 * std::f64::consts::PI.powi(2));
    for (a, row) in g.iter().enumerate() {
        for (b, z) in row.as_array().unwrap().iter().enumerate() {
            let want = if a == b { scale } else { 0.0 };
            assert!((pair(z).0 - want).abs() < 1e-14 && pair(z).1.abs() < 1e-14);
        }
    }
}

#[test]
fn eval_is_deterministic_and_reads_point_files() {
    let args = ["eval", "--form", "extended_f_2", "--sample", "2", "--frame", "random", "--phi", "random", "--seed", "5"];
    let a = flatmod(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, flatmod(&args).stdout);

    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points.json");
    let s = flatmod(&["sample", "--space", "X", "--count", "2", "--out", pts.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(0));
    let out = flatmod(&["eval", "--form", "b_2_3", "--points", pts.to_str().unwrap(), "--frame", "random", "--frame-size", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    let arity1 = v["points"][0]["components"].as_array().unwrap().iter().find(|c| c["arity"] == 1).unwrap();
    assert_eq!(arity1["values"].as_array().unwrap().len(), 3);
}

#[test]
fn eval_errors() {
    assert_eq!(flatmod(&["eval", "--form", "zeta_2", "--sample", "1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[{\"h\": 3}]").unwrap();
    assert_eq!(flatmod(&["eval", "--form", "omega", "--points", bad.to_str().unwrap()]).status.code(), Some(2));

    // R(1, 1, 1, 1) = 1 sits on the branch cut of log(beta^-1 R) for beta = -1
    let one = r#"[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]"#;
    let h = format!("[{{\"h\": [[{one}], [{one}], [{one}], [{one}]], \"residual\": 0.0}}]");
    std::fs::write(&bad, h).unwrap();
    let out = flatmod(&["eval", "--form", "extended_f_2", "--points", bad.to_str().unwrap(), "--frame", "random"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
