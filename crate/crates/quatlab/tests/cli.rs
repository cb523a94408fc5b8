//! End-to-end checks of the command-line driver.

use std::process::Command;

fn quatlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quatlab"))
}

#[test]
fn passing_suite_exits_zero_and_writes_report() {
    let dir = std::env::temp_dir().join("quatlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let status = quatlab()
        .args([
            "--suite",
            "qlar-identities",
            "--max-2l",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("binary runs");
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"schemaVersion\": 1"));
    assert!(text.contains("\"fail\": 0"));
}

#[test]
fn unknown_suite_is_an_error() {
    let output = quatlab()
        .args(["--suite", "bogus"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("unknown suite"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join("quatlab-cli-config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(
        &cfg,
        "# comment line\nsuite = qlar-identities\nmax_2l = 1\nreport = md\nseed = 7\n",
    )
    .unwrap();
    let out = dir.join("report.md");
    let status = quatlab()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--max-2l",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("binary runs");
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# Verification report: qlar-identities"));
    assert!(text.contains("max 2L: 2"), "flag must override the config file");
    // The markdown summary parses back.
    let summary = quatlab::report::Report::parse_markdown_summary(&text).unwrap();
    assert!(summary.pass > 0);
    assert_eq!(summary.fail, 0);
}

#[test]
fn invalid_config_is_rejected() {
    let dir = std::env::temp_dir().join("quatlab-cli-badconfig");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.conf");
    std::fs::write(&cfg, "tolerance garbage\n").unwrap();
    let output = quatlab()
        .args(["--config", cfg.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
}
