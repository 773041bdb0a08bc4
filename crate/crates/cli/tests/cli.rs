use std::process::{Command, Output};

use solenoid_cli::report::VerifyReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_henon-solenoid")).args(args).output().unwrap()
}

fn report(out: &Output) -> VerifyReport {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn passing_suite_exits_zero() {
    let out = run(&["verify", "saddles"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r.passed);
    assert!(r.wall_time_s.is_none());
}

#[test]
fn timings_are_opt_in() {
    let out = run(&["--timings", "verify", "filtration"]);
    assert!(report(&out).wall_time_s.is_some());
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn missing_config_is_a_usage_error() {
    assert_eq!(run(&["--config", "/nonexistent.json", "verify", "all"]).status.code(), Some(2));
}

#[test]
fn corrupted_systems_fail_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("zero-b", r#"{"factors": [{"coeffs": [[0,0],[0,0],[1,0]], "b": [0,0]}], "R": 3.0}"#),
        ("truncated", r#"{"factors": [{"coeffs": [[0,0],"#),
        ("tiny-radius", r#"{"factors": [{"coeffs": [[0,0],[0,0],[1,0]], "b": [0.3,0]}], "R": 0.01}"#),
    ];
    for (name, text) in cases {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, text).unwrap();
        let out = run(&["--system", path.to_str().unwrap(), "verify", "filtration"]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        let r = report(&out);
        assert!(!r.passed, "{name}");
        assert!(r.failures().all(|c| c.witness.is_some()), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"), "{name}");
    }
}

#[test]
fn ray_dump_is_csv() {
    let out = run(&["--c", "-1", "ray", "--theta", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("g,theta,z_re,z_im"));
    assert!(text.lines().count() > 10);
}

#[test]
fn bad_angle_is_a_usage_error() {
    assert_eq!(run(&["ray", "--theta", "1/0"]).status.code(), Some(2));
}

#[test]
fn render_writes_a_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("slice.pgm");
    let out = run(&["render", "--width", "32", "--height", "24", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(path).unwrap();
    assert!(bytes.starts_with(b"P5\n32 24\n255\n"));
    assert_eq!(bytes.len(), b"P5\n32 24\n255\n".len() + 32 * 24);
}
