//! End-to-end checks of the `gvns` binary: exit codes and file outputs.

use std::path::Path;
use std::process::Command;

fn gvns() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gvns"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn run_verify_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.cfg");
    write(
        &cfg,
        &format!(
            "d = 1\nnx = 16\nnv = 32\nlv = 6\ndt = 2e-3\nt_end = 0.1\n\
             s = 0.5\nsigma = 4\nm = 2\nlambda0 = 0.5\n\
             initial = coupled_small\nic_amplitude = 0.05\nic_theta = 0.8\n\
             snapshot_every = 25\nout_dir = {}\n",
            out.display()
        ),
    );
    let status = gvns().args(["run", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("diagnostics.csv").exists());
    assert!(out.join("run_summary.json").exists());
    assert!(out.join("snapshot_000050.gvns").exists());

    let output = gvns().args(["verify", "--run"]).arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "verify: {}", String::from_utf8_lossy(&output.stdout));
    assert!(out.join("verdict_sobolev_bound.json").exists());
    assert!(out.join("verdict_energy.json").exists());

    let output = gvns().args(["report", "--run"]).arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("lambda(t)"), "report should list the radius:\n{text}");
}

#[test]
fn config_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    write(&cfg, "d = 1\nnx = 16\nnv = 32\nlv = 6\ndt = 1e-3\nt_end = 0.1\ns = 1.5\n");
    let output = gvns().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("s must lie in (0,1]"), "{err}");

    let cfg2 = dir.path().join("unknown.cfg");
    write(&cfg2, "d = 1\nnx = 16\nnv = 32\nlv = 6\ndt = 1e-3\nt_end = 0.1\nwhatever = 1\n");
    let output = gvns().args(["run", "--config"]).arg(&cfg2).output().unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn instability_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wide.cfg");
    // a velocity profile far too wide for the box trips the support guard
    write(
        &cfg,
        &format!(
            "d = 1\nnx = 8\nnv = 16\nlv = 2\ndt = 1e-3\nt_end = 0.1\n\
             initial = coupled_small\nic_theta = 2.0\nout_dir = {}\n",
            dir.path().join("o").display()
        ),
    );
    let output = gvns().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn lab_suite_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lab");
    let status = gvns()
        .args(["lab", "--suite", "rho_u", "--samples", "20", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let reports: Vec<_> = std::fs::read_dir(&out).unwrap().collect();
    assert!(!reports.is_empty());
}
