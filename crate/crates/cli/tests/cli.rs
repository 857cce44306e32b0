//! Command-line behavior: exit codes, stdin/stdout plumbing, reproducible
//! bodies, and the environment seed override.

use std::io::Write;
use std::process::{Command, Stdio};

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jointslab"))
}

fn stdout_json(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn usage_error_exits_one() {
    let out = cli().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = cli().args(["bound", "--J", "not-a-number", "--d", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verification_failure_exits_two() {
    // a bad certificate: drop too many members from the partial-shadow witness
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    std::fs::write(
        &cert,
        serde_json::json!({
            "A": [[1,2,3,4,5],[1,2,3,4,6],[1,2,3,5,6],[1,2,4,5,6],[1,3,4,5,6],[2,3,4,5,6]],
            "B": [[1,2,3,4]],
        })
        .to_string(),
    )
    .unwrap();
    let out = cli()
        .args(["shadow", "--r", "5", "--m", "6", "--k", "1", "--mode", "certificate"])
        .arg("--cert")
        .arg(cert.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["result"]["valid"], false);
}

#[test]
fn pipes_compose_through_stdin() {
    let gen = cli().args(["setsys", "gen", "2-3"]).output().unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let mut verify = cli()
        .args(["setsys", "verify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    verify.stdin.as_mut().unwrap().write_all(&gen.stdout).unwrap();
    let out = verify.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["ok"], true);
    // stdin input digest recorded in the manifest
    assert!(doc["manifest"]["inputs"]["<stdin>"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
}

#[test]
fn identical_runs_produce_identical_bodies() {
    let strip = |mut doc: serde_json::Value| -> serde_json::Value {
        doc["manifest"].as_object_mut().unwrap().remove("wall_time_ms");
        doc
    };
    for args in [
        vec!["gen", "tight", "--d", "2", "--M", "4", "--seed", "3"],
        vec!["bound", "--J", "6", "--d", "4"],
        vec!["gen", "reguli", "--n", "3"],
        vec!["const", "--k", "2", "--m", "3", "--variant", "nu-star"],
    ] {
        let a = cli().args(&args).output().unwrap();
        let b = cli().args(&args).output().unwrap();
        assert_eq!(
            strip(stdout_json(&a)),
            strip(stdout_json(&b)),
            "args {args:?} must be reproducible"
        );
    }
}

#[test]
fn environment_seed_overrides_flag() {
    let with_flag = cli()
        .args(["gen", "tight", "--d", "2", "--M", "3", "--seed", "17"])
        .output()
        .unwrap();
    let with_env = cli()
        .args(["gen", "tight", "--d", "2", "--M", "3", "--seed", "3"])
        .env("JOINTSLAB_SEED", "17")
        .output()
        .unwrap();
    let config = |out: &std::process::Output| stdout_json(out)["result"]["config"].clone();
    assert_eq!(config(&with_flag), config(&with_env));
    assert_eq!(stdout_json(&with_env)["manifest"]["seed"], 17);
}

#[test]
fn output_file_and_downstream_consumption() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let gen = cli()
        .args(["gen", "tight", "--d", "2", "--M", "3", "--field", "p:1009"])
        .args(["-o", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let certify = cli()
        .args(["certify", "--in", cfg_path.to_str().unwrap(), "--n", "6"])
        .output()
        .unwrap();
    assert_eq!(certify.status.code(), Some(0));
    let doc = stdout_json(&certify);
    assert_eq!(doc["result"]["rank"], 28);
    assert_eq!(doc["result"]["pass"], true);
    // the input digest of the file is recorded
    assert!(doc["manifest"]["inputs"][cfg_path.to_str().unwrap()].is_string());
}

#[test]
fn certify_reduces_rational_configs_into_a_prime_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let status = cli()
        .args(["gen", "tight", "--d", "2", "--M", "3"])
        .args(["-o", cfg_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let out = cli()
        .args(["certify", "--in", cfg_path.to_str().unwrap(), "--n", "4", "--field", "p:1009"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["pass"], true);
}

#[test]
fn vol_exact_rejects_mixed_betas() {
    let out = cli().args(["vol", "--beta", "1/3,1/2", "--mode", "exact"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let lattice = cli()
        .args(["vol", "--beta", "1/3,1/2", "--mode", "lattice", "--n", "50"])
        .output()
        .unwrap();
    assert_eq!(lattice.status.code(), Some(0));
}

#[test]
fn report_on_tight_configuration_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    cli()
        .args(["gen", "tight", "--d", "2", "--M", "4", "-o", cfg_path.to_str().unwrap()])
        .status()
        .unwrap();
    let out = cli()
        .args(["report", "--in", cfg_path.to_str().unwrap(), "--n", "60"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["pass"], true);
    assert_eq!(doc["result"]["exact_ok"], true);
    // tight (2,4): J = 6 = C(4,2), so x = 4 and the line bound is C(4,1) = 4
    assert_eq!(doc["result"]["bound_x"].as_f64().unwrap(), 4.0);
    assert_eq!(doc["result"]["bound_L"].as_f64().unwrap(), 4.0);
}

#[test]
fn setsys_blowup_round_trip() {
    let gen = cli().args(["setsys", "gen", "kkk", "--k", "2"]).output().unwrap();
    let mut blow = cli()
        .args(["setsys", "blowup", "-", "--n", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    blow.stdin.as_mut().unwrap().write_all(&gen.stdout).unwrap();
    let out = blow.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["ratio"], doc["result"]["ratio_before"]);
    // 4^2 * 2^(3*2) joints
    assert_eq!(doc["result"]["system"]["J"].as_array().unwrap().len(), 1024);
}
