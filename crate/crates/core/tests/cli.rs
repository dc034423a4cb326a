//! End-to-end tests of the `blockade` binary: exit codes, byte-identical
//! output, and the CSV contracts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn blockade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("blockade-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn basis_listing() {
    let out = blockade(&["basis", "--levels", "2", "--modes", "3", "--max-excitation", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 14);
    assert_eq!(lines[0], "|g,000⟩");
    assert!(lines.contains(&"|e,100⟩"));

    let out = blockade(&["basis", "--levels", "2", "--modes", "0", "--max-excitation", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "|g⟩\n|e⟩\n");
}

#[test]
fn validate_config_echoes_derived_quantities() {
    let cfg = tmp_path("cfg.conf");
    std::fs::write(
        &cfg,
        "[system]\nn_modes = 3\nomega_eg = 108.5\nomega_c1 = 108.5\nomega_d = 100\n",
    )
    .unwrap();
    let out = blockade(&["validate-config", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# derived: delta_c = [8.5, 117, 225.5]"));
    assert!(text.contains("# derived: g = ["));
    assert!(text.contains("# config_hash: "));
    std::fs::remove_file(cfg).ok();
}

#[test]
fn config_errors_exit_1() {
    let cfg = tmp_path("bad.conf");
    std::fs::write(&cfg, "[system]\nnonsense = 1\n").unwrap();
    let out = blockade(&["validate-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(cfg).ok();

    let out = blockade(&["validate-config", "--set", "gamma=0"]);
    assert_eq!(out.status.code(), Some(1));

    let out = blockade(&["sweep-g2zero", "--axis", "bogus", "--output", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(1));

    // clap usage errors are configuration errors too
    let out = blockade(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solver_errors_exit_2() {
    // Zero drive: the steady state carries no photons and g2 is undefined.
    let trace = tmp_path("trace-undefined.csv");
    let out = blockade(&[
        "g2tau",
        "--set",
        "epsilon=0",
        "--tau-max",
        "1",
        "--tau-step",
        "0.5",
        "--output",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::remove_file(trace).ok();
}

#[test]
fn unwritable_output_exits_3_before_computing() {
    let out = blockade(&[
        "sweep-g2zero",
        "--axis",
        "delta_c=0:10:2000",
        "--output",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_csv_contract_and_determinism() {
    let out_a = tmp_path("sweep-a.csv");
    let out_b = tmp_path("sweep-b.csv");
    let args = |path: &str, extra: &[&str]| {
        let mut v = vec![
            "sweep-g2zero".to_string(),
            "--axis".into(),
            "delta_eg=5:15:3".into(),
            "--axis".into(),
            "delta_c=-20:10:4".into(),
            "--pipeline".into(),
            "oracle".into(),
            "--output".into(),
            path.to_string(),
        ];
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let run = |argv: Vec<String>| {
        let out = Command::new(env!("CARGO_BIN_EXE_blockade")).args(&argv).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(args(out_a.to_str().unwrap(), &[]));
    run(args(out_b.to_str().unwrap(), &["--serial"]));
    let a = std::fs::read_to_string(&out_a).unwrap();
    let b = std::fs::read_to_string(&out_b).unwrap();
    assert_eq!(a, b, "parallel and serial sweeps must be byte-identical");

    let body: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "x,y,g2,log10_g2,pipeline,status");
    assert_eq!(body.len(), 13);
    for row in &body[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 6);
        assert_eq!(cols[4], "oracle");
        assert_eq!(cols[5], "ok");
    }
    // repeated runs are byte-identical (no timestamps by default)
    run(args(out_b.to_str().unwrap(), &[]));
    let c = std::fs::read_to_string(&out_b).unwrap();
    assert_eq!(a, c);
    std::fs::remove_file(out_a).ok();
    std::fs::remove_file(out_b).ok();
}

#[test]
fn trace_csv_contract() {
    let path = tmp_path("trace.csv");
    let out = blockade(&[
        "g2tau",
        "--set",
        "delta_eg=10",
        "--set",
        "delta_c=10",
        "--tau-max",
        "1",
        "--tau-step",
        "0.1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // the run echoes the resolved configuration on stdout
    let echo = String::from_utf8(out.stdout).unwrap();
    assert!(echo.contains("# derived: delta_eg = 10"));
    // the caption default drive strength applies when none is given
    assert!(echo.contains("epsilon = 0.00172"));

    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# config_hash: "));
    assert!(text.contains("# pipeline: master\n"));
    assert!(text.contains("# epsilon: 0.00172\n"));
    assert!(text.contains("# scheme: two_photon\n"));
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "tau,g2");
    assert_eq!(body.len(), 12); // header + 11 samples
    let first: Vec<&str> = body[1].split(',').collect();
    assert_eq!(first[0], "0");
    let g20: f64 = first[1].parse().unwrap();
    assert!((g20 - 0.022).abs() < 0.002, "{g20}");
    std::fs::remove_file(path).ok();
}

#[test]
fn tables_command_prints_report() {
    let out = blockade(&["tables", "--table", "single", "--epsilons", "0.001"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("analytic"));
    assert!(text.contains("ill-conditioned"));
}
