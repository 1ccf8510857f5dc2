//! End-to-end tests of the command-line binary: exit codes, CSV/JSON shape,
//! config-file semantics, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermoplate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("Usage"));

    let version = run(&["--version"]);
    assert!(version.status.success());

    let sub_help = run(&["roots", "--help"]);
    assert!(sub_help.status.success());
}

#[test]
fn unknown_flag_is_a_validation_error() {
    let out = run(&["roots", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn roots_csv_header_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let file_a = dir.path().join("a.csv");
    let file_b = dir.path().join("b.csv");
    let args = ["roots", "--rmin", "0.1", "--rmax", "10", "--points", "50"];
    assert!(
        run(&[&args[..], &["--out", file_a.to_str().unwrap()]].concat())
            .status
            .success()
    );
    assert!(
        run(&[&args[..], &["--out", file_b.to_str().unwrap()]].concat())
            .status
            .success()
    );

    let a = fs::read(&file_a).unwrap();
    let b = fs::read(&file_b).unwrap();
    assert_eq!(a, b, "repeated runs must be byte-identical");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,lambda1,lambdaR,lambdaI"));
    assert_eq!(lines.count(), 50, "one data row per grid point");
}

#[test]
fn stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.csv");
    let args = ["roots", "--rmin", "0.5", "--rmax", "2", "--points", "10"];
    let piped = run(&args);
    assert!(piped.status.success());
    assert!(
        run(&[&args[..], &["--out", file.to_str().unwrap()]].concat())
            .status
            .success()
    );
    assert_eq!(piped.stdout, fs::read(&file).unwrap());
}

#[test]
fn json_output_is_well_formed() {
    let out = run(&[
        "roots", "--rmin", "1", "--rmax", "1.2", "--points", "4", "--format", "json",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("[\n"), "json output should be an array");
    assert!(text.trim_end().ends_with(']'));
    assert!(text.contains("\"lambda1\":"));
    assert_eq!(text.matches('{').count(), 4, "one object per grid point");
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = run(&["roots", "--rmin", "1", "--rmax", "1.2", "--points", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first_cell = text.lines().nth(1).unwrap().split(',').next().unwrap();
    let mantissa = first_cell.split('e').next().unwrap();
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(
        digits, 17,
        "cell {first_cell} should print 17 significant digits"
    );
}

#[test]
fn config_file_matches_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "# comment line\nsigma=2\nrmin=0.5\nrmax=2\npoints=20\n",
    );
    let from_config = run(&["roots", "--config", config.to_str().unwrap()]);
    assert!(from_config.status.success());

    let from_flags = run(&[
        "roots", "--sigma", "2", "--rmin", "0.5", "--rmax", "2", "--points", "20",
    ]);
    assert!(from_flags.status.success());
    assert_eq!(from_config.stdout, from_flags.stdout);

    let overridden = run(&[
        "roots",
        "--config",
        config.to_str().unwrap(),
        "--sigma",
        "1",
    ]);
    assert!(overridden.status.success());
    assert_ne!(
        overridden.stdout, from_config.stdout,
        "flag should override config"
    );
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sigma=1\nbogus=3\n");
    let out = run(&["roots", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("unknown config key 'bogus'"),
        "stderr was: {}",
        stderr_of(&out)
    );
}

#[test]
fn malformed_config_line_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sigma=1\njust-a-word\n");
    let out = run(&["roots", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("line 2"),
        "stderr was: {}",
        stderr_of(&out)
    );
}

#[test]
fn missing_required_value_exits_one() {
    let out = run(&["simulate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("missing required value"),
        "stderr was: {}",
        stderr_of(&out)
    );
}

#[test]
fn invalid_value_exits_one() {
    let out = run(&["roots", "--rmin", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("rmin"),
        "stderr was: {}",
        stderr_of(&out)
    );
}

#[test]
fn numerical_failure_exits_two() {
    // Two grid points six decades apart cannot be matched branch-to-branch.
    let out = run(&["roots", "--points", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_tracks_its_oracle() {
    let out = run(&["simulate", "--r", "0.5", "--t-max", "5", "--t-points", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("t,u_re,u_im,oracle_re,oracle_im,abs_err")
    );
    for line in lines {
        let err: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(err < 1e-6, "oracle deviation {err:.3e} in row {line}");
    }
}

#[test]
fn kernels_sine_sweep_runs() {
    let out = run(&[
        "kernels",
        "--kernel",
        "sine",
        "--dim",
        "4",
        "--t-lo",
        "1e3",
        "--t-hi",
        "1e4",
        "--t-points",
        "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,norm"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bounds_single_family_has_spectral_gap_column() {
    let out = run(&["bounds", "--family", "large"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,rate,constant,worst_t,worst_r,refined_constant,growth,spectral_gap")
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("large,"));
    let gap: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!(gap > 0.0);
}
