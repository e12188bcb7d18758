use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tcw");

fn tcw(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("TCW_OUT_DIR").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const IDENTITY: &str = r#"kind = "flt"

[model]
dimension = 2
octant_limits = [1.0, 1.0, 1.0, 1.0]

[grid]
step = 0.02

[monte_carlo]
path_count = 10000
master_seed = 1

[flt]
n_values = [1, 100]
"#;

#[test]
fn identity_flt_passes_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "flt_identity.toml", IDENTITY);
    let out = dir.path().join("out");
    let o = tcw(&["flt", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    for f in ["report.csv", "report.json", "config_echo.toml", "samples_n1.csv", "samples_n100.csv", "samples_limit.csv"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.starts_with("statistic,value,"));
    assert!(report.contains("ks_max_at_largest_n,"));
}

#[test]
fn seed_paths_and_workers_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", IDENTITY);
    let run = |sub: &str, workers: &str| {
        let out = dir.path().join(sub);
        let o = tcw(&[
            "flt", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9", "--paths", "300", "--workers", workers,
        ]);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    for f in ["report.csv", "samples_n100.csv", "samples_limit.csv", "config_echo.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let echo = fs::read_to_string(a.join("config_echo.toml")).unwrap();
    assert!(echo.contains("master_seed = 9") && echo.contains("path_count = 300"), "{echo}");

    // The echo reproduces the run.
    let c = tcw(&["flt", "--config", a.join("config_echo.toml").to_str().unwrap(), "--out", dir.path().join("c").to_str().unwrap()]);
    assert!(c.status.code().is_some());
    assert_eq!(fs::read(a.join("samples_n1.csv")).unwrap(), fs::read(dir.path().join("c/samples_n1.csv")).unwrap());
}

#[test]
fn env_var_sets_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &IDENTITY.replace("path_count = 10000", "path_count = 50"));
    let out = dir.path().join("from_env");
    let o = Command::new(BIN)
        .args(["flt", "--config", &cfg])
        .env("TCW_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    assert!(out.join("report.csv").exists());
}

#[test]
fn threshold_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = IDENTITY.replace("path_count = 10000", "path_count = 100") + "threshold = 1e-9\n";
    let cfg = write(dir.path(), "c.toml", &text);
    let o = tcw(&["flt", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[FAIL] ks_max_at_largest_n") && stdout.contains("(override)"), "{stdout}");
}

#[test]
fn missing_field_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &IDENTITY.replace("octant_limits = [1.0, 1.0, 1.0, 1.0]\n", ""));
    let o = tcw(&["flt", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("octant_limits") && err.contains("line"), "{err}");
}

#[test]
fn wrong_length_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &IDENTITY.replace("[1.0, 1.0, 1.0, 1.0]", "[1.0, 1.0]"));
    let o = tcw(&["flt", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn syntax_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[model\ndimension = 2\n");
    let o = tcw(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn refusal_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &IDENTITY.replace("kind = \"flt\"", "kind = \"escape_rate\""));
    let o = tcw(&["escape-rate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d >= 3"));
}

#[test]
fn kind_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", IDENTITY);
    assert_eq!(tcw(&["kr", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn unreadable_config_is_runtime_error() {
    assert_eq!(tcw(&["flt", "--config", "/nonexistent/c.toml"]).status.code(), Some(4));
}

#[test]
fn validate_reports_failing_integrability() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.toml",
        "[model]\ndimension = 3\noctant_limits = [1, 1, 1, 1, 1, 1, 1, 1]\nprofile = \"radial_power\"\nbeta = 2.5\n",
    );
    let o = tcw(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("origin_integrability  fails"), "{s}");
    assert!(s.contains("theorem.radial        false"), "{s}");
}

#[test]
fn unknown_subcommand_exits_two() {
    assert_eq!(tcw(&["bogus"]).status.code(), Some(2));
}
