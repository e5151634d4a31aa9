use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn hsnake(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsnake"))
        .args(args)
        .output()
        .expect("spawn hsnake")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn identity_payload(n: usize) -> Value {
    let rows: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    json!({ "dim": n, "rows": rows })
}

fn rotation_payload(theta: f64) -> Value {
    let (c, s) = (theta.cos(), theta.sin());
    json!({
        "dim": 3,
        "rows": [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -s, 0.0],
            [0.0, s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    })
}

fn generate(dir: &Path, kind: &str, extra: &[&str]) -> String {
    let mut args = vec!["generate", "--kind", kind];
    args.extend_from_slice(extra);
    let out = hsnake(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.join(format!("{kind}.json"));
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

fn check(rep: &Value, name: &str) -> f64 {
    rep["verification"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn decompose_identity() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "id.json", &identity_payload(3));
    let out = hsnake(&["decompose", "--matrix", &m]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let r = &rep["result"];
    assert_eq!(r["epsilon"], 1.0);
    assert_eq!(r["residual"], 0.0);
    assert_eq!(r["q"], json!([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    assert_eq!(r["t"], identity_payload(3));
}

#[test]
fn plan_group_single_rotation() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "rot.json", &rotation_payload(0.5));
    let out_dir = dir.path().join("out");
    let out = hsnake(&[
        "plan-group",
        "--matrix",
        &m,
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(check(&rep, "endpoint_residual") <= 1e-7);
    assert_eq!(rep["result"]["legs"], 1);
    let plan: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("plan.json")).unwrap()).unwrap();
    assert_eq!(
        plan["times"].as_array().unwrap().len(),
        plan["controls"].as_array().unwrap().len()
    );
    assert!(out_dir.join("controls.csv").exists());
}

#[test]
fn lift_of_a_constant_head_is_still() {
    let dir = TempDir::new().unwrap();
    let c = generate(dir.path(), "random-config", &["--seed", "5"]);
    // The generated circle starts at the head of the config drawn from the same seed.
    let curve = report(&hsnake(&[
        "generate",
        "--kind",
        "circle-head-curve",
        "--seed",
        "5",
        "--samples",
        "3",
    ]));
    let p = &curve["points"][0];
    let h = write(
        dir.path(),
        "still.json",
        &json!({ "times": [0.0, 0.5, 1.0], "points": [p, p, p] }),
    );
    let out = hsnake(&["lift-head", "--config", &c, "--head", &h]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep = report(&out);
    assert!(check(&rep, "max_tracking_error") < 1e-14);
    assert!(rep["result"]["length"].as_f64().unwrap() < 1e-12);
}

#[test]
fn generate_is_deterministic() {
    for kind in ["random-so0", "random-config", "circle-head-curve"] {
        let a = hsnake(&["generate", "--kind", kind, "--seed", "11", "--dim", "4"]);
        let b = hsnake(&["generate", "--kind", kind, "--seed", "11", "--dim", "4"]);
        let c = hsnake(&["generate", "--kind", kind, "--seed", "12", "--dim", "4"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{kind}");
        assert_ne!(a.stdout, c.stdout, "{kind}");
    }
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let m = generate(dir.path(), "random-so0", &["--seed", "2", "--dim", "4"]);
    let a = hsnake(&["plan-group", "--matrix", &m]);
    let b = hsnake(&["plan-group", "--matrix", &m]);
    assert_eq!(a.stdout, b.stdout);
    let timed = report(&hsnake(&["plan-group", "--matrix", &m, "--timing"]));
    assert!(timed["timing_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn generated_payloads_are_valid() {
    let dir = TempDir::new().unwrap();
    let m = generate(dir.path(), "random-so0", &["--seed", "7", "--dim", "5"]);
    let rep = report(&hsnake(&["decompose", "--matrix", &m]));
    assert_eq!(rep["result"]["membership"], "so0");
    let c = generate(dir.path(), "random-config", &["--seed", "7"]);
    let h = generate(dir.path(), "circle-head-curve", &["--seed", "7"]);
    let out = hsnake(&["lift-head", "--config", &c, "--head", &h]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(check(&report(&out), "max_tracking_error") < 1e-4);
}

#[test]
fn straight_snakes_sit_on_the_boundary() {
    let dir = TempDir::new().unwrap();
    let c = generate(dir.path(), "random-config", &["--preset", "straight"]);
    let config: Value = serde_json::from_str(&fs::read_to_string(&c).unwrap()).unwrap();
    let length = config["L"].as_f64().unwrap();
    let head = json!({ "times": [0.0, 1.0], "points": [[length, 0.0, 0.0], [length - 0.1, 0.1, 0.0]] });
    let h = write(dir.path(), "head.json", &head);
    let out = hsnake(&["lift-head", "--config", &c, "--head", &h]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn folded_snakes_are_singular() {
    let dir = TempDir::new().unwrap();
    let folded = json!({
        "L": 2.0,
        "partition": [0.0, 1.0, 2.0],
        "segments": [
            { "nodes": vec![[1.0, 0.0, 0.0]; 8] },
            { "nodes": vec![[-1.0, 0.0, 0.0]; 8] },
        ],
    });
    let c = write(dir.path(), "folded.json", &folded);
    let h = write(
        dir.path(),
        "head.json",
        &json!({ "times": [0.0, 1.0], "points": [[0.0, 0.0, 0.0], [0.0, 0.1, 0.0]] }),
    );
    let out = hsnake(&["lift-head", "--config", &c, "--head", &h]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn steer_and_probe_pass_their_checks() {
    let dir = TempDir::new().unwrap();
    let m = generate(dir.path(), "random-so0", &["--seed", "4"]);
    let c = generate(dir.path(), "random-config", &["--seed", "4"]);
    let out_dir = dir.path().join("steer");
    let out = hsnake(&[
        "steer",
        "--matrix",
        &m,
        "--config",
        &c,
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "report.json",
        "plan.json",
        "final_config.json",
        "head_trace.csv",
        "snakes.csv",
    ] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let probe = report(&hsnake(&["probe-bracket", "--dim", "4", "--i", "1", "--j", "3"]));
    assert!((probe["result"]["slope"].as_f64().unwrap() + 1.0).abs() < 0.2);
}

#[test]
fn several_matrices_fan_out() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", &identity_payload(3));
    let b = write(dir.path(), "b.json", &rotation_payload(1.0));
    let out_dir = dir.path().join("out");
    let out = hsnake(&[
        "factorize",
        "--matrix",
        &a,
        "--matrix",
        &b,
        "--jobs",
        "2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reps: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let reps = reps.as_array().unwrap();
    assert_eq!(reps.len(), 2);
    assert!(reps[1]["scenario"]["inputs"]["matrix"]
        .as_str()
        .unwrap()
        .ends_with("b.json"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        hsnake(&["decompose", "--matrix", missing.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(
        hsnake(&["decompose", "--matrix", garbage.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let mut bad = identity_payload(3);
    bad["rows"][0][1] = json!(0.5);
    let bad = write(dir.path(), "bad.json", &bad);
    assert_eq!(hsnake(&["decompose", "--matrix", &bad]).status.code(), Some(2));

    assert_eq!(
        hsnake(&["probe-bracket", "--i", "0", "--j", "7"]).status.code(),
        Some(2)
    );
}
