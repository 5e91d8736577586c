use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vmkdv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmkdv")).args(args).output().expect("run vmkdv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn golden_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/golden")
}

#[test]
fn derive_flow_prints_canonical_text() {
    let o = vmkdv(&["derive-flow", "--n", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "u_t3 = -u3 - 3/2*<u0,u0>*u1\n");
    let again = vmkdv(&["derive-flow", "--n", "1"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn lax_json_matches_golden_file() {
    let o = vmkdv(&["lax", "--n", "1", "--format", "json"]);
    assert!(o.status.success());
    let got: Value = serde_json::from_slice(&o.stdout).unwrap();
    let want: Value = serde_json::from_str(&fs::read_to_string(golden_dir().join("lax_v3.json")).unwrap()).unwrap();
    assert_eq!(got, want);
}

#[test]
fn check_zcr_reports_exact_zero() {
    let o = vmkdv(&["check-zcr", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("residual: exact zero"));
}

#[test]
fn soliton_csv_is_deterministic_and_verified() {
    let args = ["soliton", "--mu", "1", "--c0", "0", "--c", "1,0", "--t3", "0.5", "--format", "csv"];
    let o = vmkdv(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,u1,u2");
    assert_eq!(lines.len(), 802);
    let row: Vec<f64> = lines[401].split(',').map(|v| v.parse().unwrap()).collect();
    // peak of 2μ sech(x - 0.5) sampled at x = 0
    assert!((row[1] - 2.0 / 0.5f64.cosh()).abs() < 1e-14);
    assert_eq!(vmkdv(&args).stdout, o.stdout);
    assert!(String::from_utf8(o.stderr).unwrap().contains("PASS flow residual n=1"));
}

#[test]
fn out_dir_receives_field_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = vmkdv(&[
        "soliton", "--mu", "0.8", "--c0", "0.6", "--c", "0.8", "--t3", "0.2", "--t5", "0.1", "--format", "csv",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let reports: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r["pass"] == Value::Bool(true)));
    assert!(fs::read_to_string(out.join("field.csv")).unwrap().starts_with("x,u1\n"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "format = \"csv\"\n[grid]\nx0 = -10.0\nx1 = 10.0\nnx = 101\n[times]\nt3 = 0.1\n").unwrap();
    let base = ["--config", cfg.to_str().unwrap(), "soliton", "--mu", "1", "--c0", "0", "--c", "1"];
    let o = vmkdv(&base);
    assert_eq!(stdout(&o).lines().count(), 102);
    let o = vmkdv(&[&base[..], &["--nx", "201"]].concat());
    assert_eq!(stdout(&o).lines().count(), 202);
}

#[test]
fn soliton_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("soliton.json");
    fs::write(&p, r#"{"mu": 1.5, "c0": 0.0, "c": [0.0, 1.0], "times": {"t1": 0.5, "t3": 0.2}}"#).unwrap();
    let o = vmkdv(&["soliton", "--params", p.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"][0]["pass"], Value::Bool(true));
    assert_eq!(v["u"].as_array().unwrap().len(), 801);
}

#[test]
fn breather_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("breather.json");
    fs::write(&p, r#"{"mu": [0.8, 0.6], "s": 1, "C": [[[1, 0]], [[0, 0]], [[0, 1]], [[0, 0]]], "times": {"t3": 0.3}}"#).unwrap();
    let o = vmkdv(&["breather", "--params", p.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("x,u1,u2\n"));
}

#[test]
fn config_errors_exit_2_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[grid]\nnz = 3\n").unwrap();
    let o = vmkdv(&["--config", cfg.to_str().unwrap(), "derive-flow"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["message"].as_str().unwrap().contains("nz"));

    let o = vmkdv(&["derive-flow", "--n", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"].as_str().unwrap().contains("recursion cap"));

    let o = vmkdv(&["soliton", "--mu", "1", "--c0", "0.5", "--c", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = vmkdv(&["verify-all", "--golden-dir", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "io");
}

#[test]
fn failed_verification_exits_1() {
    let o = vmkdv(&["backlund-check", "--mu", "1", "--c0", "0.6", "--c", "0.8", "--scale", "1.01"]);
    assert_eq!(o.status.code(), Some(1));
    let o = vmkdv(&["backlund-check", "--mu", "1", "--c0", "0.6", "--c", "0.8"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn corrupted_golden_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["flow_t3.txt", "flow_t5.txt", "lax_v3.json"] {
        fs::copy(golden_dir().join(f), dir.path().join(f)).unwrap();
    }
    fs::write(dir.path().join("flow_t5.txt"), "u5 + 5/2*<u0,u0>*u3\n").unwrap();
    let o = vmkdv(&["verify-all", "--quick", "--golden-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{text}");
    assert!(failed[0].contains("golden flow t5"));
    assert!(text.contains("11/12 criteria passed (quick)"));
}

#[test]
fn shipped_configs_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let o = Command::new(env!("CARGO_BIN_EXE_vmkdv"))
        .current_dir(&root)
        .args(["--config", "configs/run.toml", "soliton"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("x,u1,u2\n"));
    let o = vmkdv(&["breather", "--params", root.join("configs/breather.json").to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in fs::read_dir(root.join("schemas")).unwrap() {
        let text = fs::read_to_string(f.unwrap().path()).unwrap();
        serde_json::from_str::<Value>(&text).unwrap();
    }
}
