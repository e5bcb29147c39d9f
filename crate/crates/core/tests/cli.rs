use std::path::Path;
use std::process::{Command, Output};

use ncagm::certify::{instance_to_json, sharp_pair};

fn ncagm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncagm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_prints_lambda_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncagm(dir.path(), &["solve", "--m", "2", "--n", "3", "--sign", "plus"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let lambda: f64 = text
        .split("lambda = ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .expect("lambda printed");
    assert!((lambda - 1.5).abs() < 1e-3);
    assert!(text.contains("gap = "));
    assert!(dir.path().join("lambda_m2_n3_plus.dat-s").exists());
    let json = std::fs::read_to_string(dir.path().join("lambda_m2_n3_plus.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["kind"], "solution");
    assert_eq!(v["status"], "optimal");
}

#[test]
fn export_only_skips_the_solve() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncagm(dir.path(), &["solve", "--m", "2", "--n", "3", "--export-only", "--sdpa", "p.dat-s"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("p.dat-s")).unwrap();
    let p = ncagm::sdp::import_sdpa_str(&text).unwrap();
    assert_eq!(p.num_constraints(), 40);
    assert!(!stdout(&o).contains("lambda ="));
    assert!(!dir.path().join("lambda_m2_n3_plus.json").exists());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--m", "5", "--n", "4"][..],
        &["solve", "--m", "2"],
        &["table", "--rows", "3x2"],
        &["table", "--tol", "0"],
        &["frobnicate"],
    ] {
        let o = ncagm(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(ncagm(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn table_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["table", "--rows", "2x2,3x3,2x4,1x3", "--format", "csv"];
    let first = ncagm(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0));
    let threaded = Command::new(env!("CARGO_BIN_EXE_ncagm"))
        .current_dir(dir.path())
        .env("NCAGM_THREADS", "3")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(first.stdout, ncagm(dir.path(), &args).stdout);
    assert_eq!(first.stdout, threaded.stdout);
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n,lambda1,lambda2,bound,verdict"));
    assert_eq!(lines.last(), Some("1,3,3.000000,0.000000,3.000000,ok"));
}

#[test]
fn table_flags_the_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncagm(dir.path(), &["table", "--rows", "5x5", "--format", "json", "--out", "t.json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(v[0]["verdict"], "VIOLATION");
    let l2: f64 = v[0]["lambda2"].as_str().unwrap().parse().unwrap();
    assert!((l2 - 144.6488).abs() < 1e-3);
}

#[test]
fn sos_m2_reports_and_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncagm(dir.path(), &["certify", "sos-m2", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exact identity verified, λ = 3"));
    let o = ncagm(dir.path(), &["certify", "recheck", "--input", "sos_m2_n4.json"]);
    assert_eq!(o.status.code(), Some(0));

    // a wrong λ breaks the identity
    let path = dir.path().join("sos_m2_n4.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["lambda"] = "5/2".into();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = ncagm(dir.path(), &["certify", "recheck", "--input", "sos_m2_n4.json"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn farkas_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncagm(dir.path(), &["certify", "farkas", "--m", "2", "--n", "2", "--lambda", "0.4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = ncagm(dir.path(), &["certify", "recheck", "--input", "farkas_m2_n2.json"]);
    assert_eq!(o.status.code(), Some(0));

    // a tampered multiplier is rejected
    let path = dir.path().join("farkas_m2_n2.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let dual = v["dual"].as_array_mut().unwrap();
    let k = (0..dual.len())
        .max_by(|&i, &j| {
            let f = |x: &serde_json::Value| x.as_str().unwrap().parse::<f64>().unwrap().abs();
            f(&dual[i]).total_cmp(&f(&dual[j]))
        })
        .unwrap();
    let flipped = -dual[k].as_str().unwrap().parse::<f64>().unwrap();
    dual[k] = flipped.to_string().into();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = ncagm(dir.path(), &["certify", "recheck", "--input", "farkas_m2_n2.json"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));

    // a feasible target has no certificate
    let o = ncagm(dir.path(), &["certify", "farkas", "--m", "2", "--n", "2", "--lambda", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no certificate"));
}

#[test]
fn check_instance_on_sharp_pair() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sharp.json"), instance_to_json(2, &sharp_pair()).to_string()).unwrap();
    let o = ncagm(dir.path(), &["certify", "check-instance", "--input", "sharp.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("min_eig = -0.5000000000"));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sharp.json.report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["violations"], serde_json::json!([]));

    // outside the hypotheses: ΣAᵢ exceeds n·I
    let big = vec![nalgebra::DMatrix::from_element(1, 1, 3.0); 2];
    std::fs::write(dir.path().join("big.json"), instance_to_json(2, &big).to_string()).unwrap();
    let o = ncagm(dir.path(), &["certify", "check-instance", "--input", "big.json"]);
    assert_eq!(o.status.code(), Some(5));
}
