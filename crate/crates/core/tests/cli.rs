use std::path::Path;
use std::process::{Command, Output};

fn orbitstat(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitstat")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn count_only_prints_the_ball_size() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbitstat(&["enum-ball", "--family", "sl2z", "--t", "2", "--count-only"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "324");
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "count-only wrote files");
}

#[test]
fn negative_height_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbitstat(&["enum-ball", "--family", "sl2z", "--t", "-2.0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`t`"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbitstat(&["growth", "--family", "sl2z", "--set", "budget.max_elemnts=5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("max_elemnts"), "{}", stderr(&o));
}

#[test]
fn run_verify_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("growth.toml");
    std::fs::write(&cfg, "family = \"sl2-gauss\"\nt_grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    for (out, workers) in [("a", "1"), ("b", "2")] {
        let o = orbitstat(&["growth", "--config", cfg, "--out", out, "--workers", workers], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("log-count slope"));
    }
    let o = orbitstat(&["verify", "a"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = orbitstat(&["compare", "a", "b"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    std::fs::write(dir.path().join("b/growth.csv"), "lattice,t,count,log_count\n").unwrap();
    assert_eq!(orbitstat(&["verify", "b"], dir.path()).status.code(), Some(1));
    assert_eq!(orbitstat(&["compare", "a", "b"], dir.path()).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbitstat(&["verify", "missing"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
