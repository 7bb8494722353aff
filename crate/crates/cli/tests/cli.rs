use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fidelimax"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).env_remove("FIDELIMAX_THREADS").output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn value(stdout: &str, key: &str) -> f64 {
    let line = stdout.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no '{key}' in {stdout}"));
    line.split('=').nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
}

fn toy(dir: &Path) -> PathBuf {
    ok(dir, &["scheme", "pauli-set", "--target", "basis:2:1", "--paulis", "Z", "--mode", "eigenbasis", "--reps", "100", "--out", "toy.json"]);
    dir.join("toy.json")
}

#[test]
fn validate_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    toy(d);
    assert_eq!(code(d, &["plan", "validate", "toy.json"]), 0);
    fs::write(d.join("bad.json"), "{not json").unwrap();
    assert_eq!(code(d, &["plan", "validate", "bad.json"]), 2);
    let text = fs::read_to_string(d.join("toy.json")).unwrap();
    fs::write(d.join("eps.json"), text.replace("\"epsilon\": 0.05", "\"epsilon\": 0.3")).unwrap();
    let out = run(d, &["plan", "validate", "eps.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("epsilon 0.3"));
    // Break completeness of the only setting.
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["settings"][0]["effects"][0][0][0][0] = serde_json::json!(0.5);
    fs::write(d.join("incomplete.json"), json.to_string()).unwrap();
    let out = run(d, &["plan", "validate", "incomplete.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("setting 'Z'"));
    assert_eq!(code(d, &["plan", "validate", "missing.json"]), 2);
    assert_eq!(code(d, &["no-such-command"]), 2);
}

#[test]
fn toy_build_and_estimate() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    toy(d);
    let out = ok(d, &["build", "--plan", "toy.json", "--out", "est.json"]);
    assert!((value(&out, "risk") - 0.1334).abs() < 2e-3);
    assert!((value(&out, "constant") - 0.5).abs() < 1e-3);
    let coeffs = out.lines().find(|l| l.starts_with("setting 'Z'")).unwrap();
    assert!(coeffs.contains("-4.7") && coeffs.contains(", 4.7"), "{coeffs}");
    // All shots in outcome 1 (the target |1⟩).
    fs::write(d.join("data.json"), r#"{"counts": [[0, 100]]}"#).unwrap();
    let est = ok(d, &["estimate", "--estimator", "est.json", "--data", "data.json"]);
    let f: f64 = est.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((f - 0.976).abs() < 2e-3, "{est}");
    assert!(est.contains("± 1.334") && est.trim_end().ends_with("(confidence 9.50000e-1)"), "{est}");
}

#[test]
fn optimal_plan_meets_closed_form() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["scheme", "optimal", "--target", "random:1:5", "--reps", "100", "--out", "opt.json"]);
    let out = ok(d, &["build", "--plan", "opt.json", "--out", "est.json"]);
    let bound: f64 = ok(d, &["risk", "lower-bound", "--reps", "100"]).trim().parse().unwrap();
    assert!((value(&out, "risk") - 0.1333).abs() < 2e-3);
    assert!((value(&out, "risk") - bound).abs() < 2e-3);
}

#[test]
fn reduced_flag_rejects_general_plans() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["scheme", "pauli-set", "--target", "ghz:2", "--paulis", "XX,ZZ", "--reps", "50", "--out", "two.json"]);
    assert_eq!(code(d, &["build", "--plan", "two.json", "--out", "e.json", "--reduced-two-outcome"]), 1);
    assert!(!d.join("e.json").exists());
}

#[test]
fn estimate_rejects_foreign_data() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    toy(d);
    ok(d, &["build", "--plan", "toy.json", "--out", "est.json"]);
    ok(d, &["scheme", "optimal", "--target", "basis:2:1", "--reps", "100", "--out", "other.json"]);
    ok(d, &["simulate", "--plan", "other.json", "--seed", "1", "--out", "data.json"]);
    assert_eq!(code(d, &["estimate", "--estimator", "est.json", "--data", "data.json"]), 1);
}

#[test]
fn risk_formulas() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(ok(d, &["risk", "stabilizer", "--d", "4", "--invert", "--risk", "0.05"]).trim(), "1657");
    assert_eq!(ok(d, &["risk", "lower-bound", "--invert", "--risk", "0.05"]).trim(), "735");
    let v: f64 = ok(d, &["risk", "vartheta", "--epsilon", "0.1"]).trim().parse().unwrap();
    assert!((v - 6.539).abs() < 1e-3);
    let lb: f64 = ok(d, &["risk", "lower-bound", "--reps", "734"]).trim().parse().unwrap();
    assert!((lb - 0.05).abs() < 1e-4);
    let s: f64 = ok(d, &["risk", "stabilizer", "--d", "4", "--reps", "1657"]).trim().parse().unwrap();
    let t: f64 = ok(d, &["risk", "two-outcome", "--omega1", "1", "--omega2", "0.3333333333333333", "--reps", "1657"])
        .trim()
        .parse()
        .unwrap();
    assert!((s - t).abs() < 1e-5 && s <= 0.05);
    // N = d − 1 reproduces the stabilizer count.
    assert_eq!(ok(d, &["risk", "pauli", "--norm", "3", "--d", "4", "--invert", "--risk", "0.05"]).trim(), "1657");
    assert_eq!(code(d, &["risk", "pauli", "--norm", "1", "--d", "4", "--invert", "--risk", "0.3"]), 1);
}

#[test]
fn stabilizer_chain_reproduces_table_value() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let reps = ok(d, &["risk", "stabilizer", "--d", "4", "--invert", "--risk", "0.05"]);
    let reps = reps.trim();
    ok(d, &["scheme", "stabilizer", "--n", "2", "--reps", reps, "--samples-out", "samples.json", "--out", "stab.json"]);
    let out = ok(d, &["build", "--plan", "stab.json", "--out", "est.json", "--reduced-two-outcome"]);
    let r = value(&out, "risk");
    assert!(r <= 0.0501 && r > 0.045, "{r}");
    let samples: Vec<String> = serde_json::from_str(&fs::read_to_string(d.join("samples.json")).unwrap()).unwrap();
    assert_eq!(samples.len(), 1657);
}

#[test]
fn trials_report_coverage() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["scheme", "stabilizer", "--n", "2", "--reps", "1657", "--out", "stab.json"]);
    ok(d, &["build", "--plan", "stab.json", "--out", "est.json", "--reduced-two-outcome"]);
    let args = [
        "trials", "--plan", "stab.json", "--estimator", "est.json", "--state", "ghz:2", "--depolarize", "0.1", "--trials",
        "200", "--seed", "4", "--out", "report.json",
    ];
    let out = ok(d, &args);
    assert!(value(&out, "coverage") >= 0.90);
    assert!((value(&out, "true fidelity") - 0.925).abs() < 1e-9);
    let first = fs::read(d.join("report.json")).unwrap();
    // Same inputs and seed, other thread count: byte-identical report.
    let out2 = bin().current_dir(d).args(args).env("FIDELIMAX_THREADS", "1").output().unwrap();
    assert!(out2.status.success());
    assert_eq!(fs::read(d.join("report.json")).unwrap(), first);
}

#[test]
fn curve_csv_is_monotone() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["curve", "--target", "ghz:2", "--l", "0,1,3", "--r", "50,100", "--seed", "2", "--out", "curve.csv"]);
    let text = fs::read_to_string(d.join("curve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,R,risk"));
    let rows: Vec<(usize, u64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 6);
    let get = |l, r| rows.iter().find(|x| x.0 == l && x.1 == r).unwrap().2;
    for l in [0, 1, 3] {
        assert!(get(l, 100) <= get(l, 50) + 2e-3);
    }
    for r in [50, 100] {
        assert!(get(1, r) <= get(0, r) + 2e-3 && get(3, r) <= get(1, r) + 2e-3);
    }
    assert!((get(0, 50) - 0.5).abs() < 1e-3);
}

#[test]
fn mle_and_robustness_commands() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let plan = ["scheme", "pauli-set", "--target", "ghz:2", "--paulis", "XX", "--mode", "eigenbasis", "--reps", "500"];
    ok(d, &[&plan[..], &["--out", "xx.json"]].concat());
    ok(d, &["simulate", "--plan", "xx.json", "--depolarize", "0.1", "--seed", "8", "--out", "data.json"]);
    let out = ok(d, &["mle", "--plan", "xx.json", "--data", "data.json", "--bootstrap", "100", "--out", "mle.json"]);
    assert!(value(&out, "MLE fidelity") < 0.6);
    assert!(out.contains("bootstrap interval"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("mle.json")).unwrap()).unwrap();
    assert!(json["interval"]["lo"].as_f64().unwrap() <= json["interval"]["hi"].as_f64().unwrap());

    toy(d);
    ok(d, &["build", "--plan", "toy.json", "--out", "est.json"]);
    let out = ok(
        d,
        &[
            "robustness", "--plan", "toy.json", "--estimator", "est.json", "--depolarize", "0.1", "--delta-s", "0.05",
            "--delta-m", "0.02", "--runs", "10", "--out", "rob.json",
        ],
    );
    assert!(out.contains("within bound = 10/10"), "{out}");
}

#[test]
fn commands_are_idempotent() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["scheme", "dfe", "--target", "ghz:3", "--risk", "0.2", "--seed", "5", "--out", "a.json"]);
    ok(d, &["scheme", "dfe", "--target", "ghz:3", "--risk", "0.2", "--seed", "5", "--out", "b.json"]);
    assert_eq!(fs::read(d.join("a.json")).unwrap(), fs::read(d.join("b.json")).unwrap());
    assert_eq!(code(d, &["plan", "validate", "a.json"]), 0);
    toy(d);
    ok(d, &["build", "--plan", "toy.json", "--out", "e1.json"]);
    ok(d, &["build", "--plan", "toy.json", "--out", "e2.json"]);
    assert_eq!(fs::read(d.join("e1.json")).unwrap(), fs::read(d.join("e2.json")).unwrap());
    ok(d, &["simulate", "--plan", "toy.json", "--seed", "3", "--out", "s1.json"]);
    ok(d, &["simulate", "--plan", "toy.json", "--seed", "3", "--out", "s2.json"]);
    assert_eq!(fs::read(d.join("s1.json")).unwrap(), fs::read(d.join("s2.json")).unwrap());
}

#[test]
fn bad_usage_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(code(d, &["scheme", "optimal", "--target", "nonsense", "--reps", "10", "--out", "x.json"]), 2);
    assert_eq!(code(d, &["scheme", "optimal", "--target", "ghz:1", "--reps", "10", "--out", "nodir/x.json"]), 2);
    assert_eq!(code(d, &["build", "--plan", "toy.json"]), 2);
    assert_eq!(code(d, &["--threads", "0", "risk", "vartheta"]), 2);
}
