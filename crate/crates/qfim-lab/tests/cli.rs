//! Integration tests driving the installed binary end to end.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qfim-lab"))
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("qfim-lab-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).expect("temp file");
    f.write_all(contents.as_bytes()).expect("write temp");
    path
}

#[test]
fn sweep_preset_emits_deterministic_csv() {
    let run = || {
        let out = bin()
            .args(["sweep", "--preset", "fig4"])
            .output()
            .expect("spawn");
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "CSV must be byte-deterministic");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,qfi_p,qfi_r");
    assert_eq!(text.lines().count(), 702); // header + 701 rows
}

#[test]
fn sweep_accepts_spec_file_and_flag_overrides() {
    let spec = r#"{
        "axis": "t", "start": 0.0, "stop": 2.0, "steps": 5,
        "config": {
            "initial": {"p": 0.1, "r": 0.9},
            "env": {"type": "bosonic", "gamma01": 0.01, "gamma02": 0.01,
                    "gamma012": 0.01, "cutoff": 1.0},
            "omega1": 0.5, "omega2": 0.5
        },
        "outputs": ["qfi_r", "coherence"]
    }"#;
    let path = write_temp("spec.json", spec);
    let out = bin()
        .args(["sweep", "--spec", path.to_str().unwrap(), "--steps", "3"])
        .output()
        .expect("spawn");
    std::fs::remove_file(&path).ok();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().count(),
        4,
        "--steps flag must override the file:\n{text}"
    );
    assert!(text.starts_with("t,qfi_r,coherence\n"));
}

#[test]
fn sweep_writes_nan_rows_and_notes_for_domain_errors() {
    // p axis includes 0 where the entanglement QFI is undefined.
    let out = bin()
        .args([
            "sweep", "--preset", "fig3b", "--start", "0", "--stop", "0.5", "--steps", "3",
        ])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0,nan"), "{text}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("qfi_p"),
        "stderr should note the failing cell: {err}"
    );
}

#[test]
fn sweep_rejects_bad_usage() {
    let out = bin().args(["sweep"]).output().expect("spawn");
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["sweep", "--preset", "nope"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["sweep", "--preset", "fig4", "--outputs", "bogus"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));

    // Invalid range is a usage error, not a crash.
    let out = bin()
        .args(["sweep", "--preset", "fig4", "--stop", "-5"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn state_prints_evolved_matrix() {
    let cfg = r#"{
        "initial": {"p": 0.5, "r": 1.0},
        "env": {"type": "spin", "N": 5, "lambda": 0.2, "h": 0.1},
        "omega1": 0.5, "omega2": 0.5
    }"#;
    let path = write_temp("cfg.json", cfg);
    let out = bin()
        .args(["state", "--config", path.to_str().unwrap(), "--t", "0"])
        .output()
        .expect("spawn");
    std::fs::remove_file(&path).ok();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    // Bell state at t = 0: corners and outer diagonal are 1/2.
    assert!(rows[0].starts_with("0.5+0i"));
    assert!(rows[0].ends_with("0.5+0i"));
    assert!(rows[1].split('\t').nth(1).unwrap().starts_with("0+0i"));
}

#[test]
fn verify_quick_reports_known_defect_and_exits_nonzero() {
    // The suite carries one faithful-but-unsatisfiable check (the entrywise
    // SLD commutator); verify must name it and exit 1.
    let json_path =
        std::env::temp_dir().join(format!("qfim-lab-test-{}-report.json", std::process::id()));
    let out = bin()
        .args([
            "verify",
            "--level",
            "quick",
            "--json",
            json_path.to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let pass_lines = text.lines().filter(|l| l.starts_with("[PASS]")).count();
    let fail_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    assert_eq!(pass_lines, 11, "{text}");
    assert_eq!(fail_lines.len(), 1, "{text}");
    assert!(fail_lines[0].contains("sld_commutator_entrywise"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    std::fs::remove_file(&json_path).ok();
    assert_eq!(report["level"], "quick");
    assert_eq!(report["passed"], false);
    assert_eq!(report["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn verify_rejects_unknown_level() {
    let out = bin()
        .args(["verify", "--level", "exhaustive"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn state_rejects_missing_or_invalid_config() {
    let out = bin()
        .args(["state", "--config", "/nonexistent/cfg.json", "--t", "1"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));

    let path = write_temp("broken.json", "{\"initial\": {\"p\": 2.0, \"r\": 0.5}");
    let out = bin()
        .args(["state", "--config", path.to_str().unwrap(), "--t", "1"])
        .output()
        .expect("spawn");
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_env_is_honored() {
    // Not observable from outside beyond "it still works"; run a sweep
    // under a 1-thread cap and compare bytes against the default.
    let capped = bin()
        .args(["sweep", "--preset", "fig8b"])
        .env("QFIM_LAB_THREADS", "1")
        .output()
        .expect("spawn");
    let free = bin()
        .args(["sweep", "--preset", "fig8b"])
        .output()
        .expect("spawn");
    assert!(capped.status.success());
    assert_eq!(capped.stdout, free.stdout);
}
