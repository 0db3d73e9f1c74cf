use disperse_lab::propagator::{evolve_radial, EvalPoint, RadialProfile};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_disperse-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env("DISPERSE_LAB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn baseline_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../baselines/baseline.json")
}

fn scratch_file(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("disperse-lab-{}-{name}", std::process::id()))
}

#[test]
fn gate_above_two_is_forbidden() {
    let o = run(&["gate", "--n", "3", "--r", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "forbidden");
    let pairs = v["pairs"].as_array().unwrap();
    assert!(!pairs.is_empty());
    assert!(pairs.iter().all(|p| p["verdict"] == "forbidden"));
}

#[test]
fn usage_errors_exit_two() {
    let empty = run(&["propagate", "--n", "3", "--profile", "bump:0,2", "--t", "", "--x", "1"]);
    assert_eq!(empty.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("error"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gate", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn propagate_csv_reproduces_the_library_bit_for_bit() {
    let o = run(&[
        "propagate", "--n", "3", "--profile", "bump:0,2", "--t", "0.5,2", "--x", "0.5,1,4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,t,x_abs,re,im,abs,err_est"));
    let p = RadialProfile::bump(0.0, 2.0).unwrap();
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let t: f64 = f[1].parse().unwrap();
        let x: f64 = f[2].parse().unwrap();
        let v = evolve_radial(&p, EvalPoint::new(3, x, t).unwrap()).unwrap().value;
        assert_eq!(f[3].parse::<f64>().unwrap().to_bits(), v.re.to_bits());
        assert_eq!(f[4].parse::<f64>().unwrap().to_bits(), v.im.to_bits());
        rows += 1;
    }
    assert_eq!(rows, 6);
}

#[test]
fn repeated_and_parallel_runs_are_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["propagate", "--n", "2", "--profile", "gaussian:1", "--t", "0.1:2:0.3", "--x", "0.5,1,3"],
        &["norm", "--family", "power", "--n", "3", "--which", "X", "--scan", "alpha=0.5:2:0.25"],
        &["blowup", "--n", "3", "--sigma", "1.5", "--q", "5"],
    ];
    for args in cases {
        let a = run_with_threads(args, "1");
        let b = run_with_threads(args, "3");
        let c = run_with_threads(args, "3");
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}: 1 vs 3 threads");
        assert_eq!(b.stdout, c.stdout, "{args:?}: repeated run");
    }
}

#[test]
fn decay_reports_a_fit_as_json() {
    let o = run(&["decay", "--mode", "time", "--n", "3", "--profile", "bump:0,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["axis", "fitted_exponent", "grid", "half_width", "max_residual"]);
    assert!((v["fitted_exponent"].as_f64().unwrap() + 1.5).abs() < 0.1);
}

#[test]
fn decay_accepts_a_measure_file() {
    let path = scratch_file("measure.json");
    std::fs::write(
        &path,
        r#"[{"omega": 0.0, "weight_re": 1.0, "weight_im": 0.0, "family": "bump", "params": [0.0, 2.0]},
            {"omega": 3.0, "weight_re": 0.0, "weight_im": 0.5, "family": "bump", "params": [1.0, 2.0]}]"#,
    )
    .unwrap();
    let o = run(&["decay", "--mode", "space", "--n", "2", "--measure", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["fitted_exponent"].as_f64().unwrap() <= -0.5 + 0.1);
}

#[test]
fn special_dump_has_a_header_and_one_row_per_z() {
    let o = run(&["special", "dump", "--n", "3", "--z", "2:6:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("z,"), "{header}");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn verify_against_the_checked_in_baseline() {
    let base = baseline_path();
    let ok = run(&["verify", "--suite", "7", "--baseline", base.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let v: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["baseline_mismatches"].as_array().unwrap().is_empty());

    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&base).unwrap()).unwrap();
    doc["entries"]["c7.p_bound.n3"]["value"] = serde_json::json!(1.0e6);
    let tampered = scratch_file("tampered.json");
    std::fs::write(&tampered, doc.to_string()).unwrap();
    let bad = run(&["verify", "--suite", "7", "--baseline", tampered.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("c7.p_bound.n3"));

    doc["entries"].as_object_mut().unwrap().remove("c7.p_bound.n3");
    std::fs::write(&tampered, doc.to_string()).unwrap();
    let missing = run(&["verify", "--suite", "7", "--baseline", tampered.to_str().unwrap()]);
    std::fs::remove_file(&tampered).ok();
    assert_eq!(missing.status.code(), Some(1));
}
