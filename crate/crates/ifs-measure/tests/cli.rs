//! End-to-end checks of the installed binary: exit codes, format parity,
//! and the config echo round-trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ifs-measure"))
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("ifs-measure-bin-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}-{}.cfg", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const THIRDS: &str = "\
map = affine 1/3 0
map = affine 1/3 2/3
p = 1/3 2/3
g = poly 0 1
M = 3
";

#[test]
fn integrate_succeeds_and_reports_two_thirds() {
    let cfg = write_config("ok", THIRDS);
    let out = run(&["integrate", cfg.to_str().unwrap(), "--k=6", "--print-digits=20"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("k=6  0.66666666666666666667"), "{text}");
}

#[test]
fn csv_and_plain_print_identical_digit_strings() {
    let cfg = write_config("fmt", THIRDS);
    let args = ["moments", cfg.to_str().unwrap(), "--k=10", "--print-digits=30"];
    let plain = stdout(&run(&args));
    let csv = stdout(&run(&[&args[..], &["--format=csv"]].concat()));

    let mut plain_values = Vec::new();
    for line in plain.lines() {
        let mut parts = line.split_whitespace();
        let _ = parts.next();
        plain_values.push(parts.next().unwrap().to_string());
    }
    let mut csv_values = Vec::new();
    for line in csv.lines().skip(1) {
        csv_values.push(line.split(',').nth(1).unwrap().to_string());
    }
    assert_eq!(plain_values, csv_values);
    assert_eq!(plain_values.len(), 4);
}

#[test]
fn echo_round_trips_to_identical_output() {
    let cfg = write_config(
        "echo",
        "map = moebius 0 1 1 2\nmap = moebius 0 1 1 4\np = 0.5 1/2\nepsilon = 1/4\nk = 9\ndigits = 70\n",
    );
    let first = run(&["validate", cfg.to_str().unwrap(), "--echo"]);
    assert!(first.status.success());
    let echoed = stdout(&first);
    assert!(echoed.contains("p = 0.5 1/2"), "literals must survive: {echoed}");

    let cfg2 = write_config("echo2", &echoed);
    let second = run(&["validate", cfg2.to_str().unwrap(), "--echo"]);
    assert!(second.status.success());
    assert_eq!(echoed, stdout(&second));
}

#[test]
fn config_problems_exit_1() {
    let missing = run(&["integrate", "/nonexistent/path.cfg"]);
    assert_eq!(missing.status.code(), Some(1));

    let cfg = write_config("unknown-key", "map = affine 1/3 0\nwat = 3\n");
    let unknown = run(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stdout(&unknown).contains("wat"), "diagnostic must name the key");

    let cfg = write_config("dup-key", "map = affine 1/3 0\nmap = affine 1/3 2/3\np = 1/2 1/2\nk = 3\nk = 4\n");
    let dup = run(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(dup.status.code(), Some(1));
    assert!(stdout(&dup).contains('k'), "diagnostic must name the key");

    let usage = run(&["frobnicate"]);
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn failed_hypotheses_exit_2() {
    let cfg = write_config(
        "expanding",
        "map = affine 11/10 0\nmap = affine 1/3 0\np = 1/2 1/2\n",
    );
    let out = run(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("contraction check failed"), "{}", stdout(&out));

    let cfg = write_config(
        "no-lyapunov",
        "map = affine 1/3 0\nmap = affine 1/3 2/3\npfn = 1/4 1/2\npfn = 3/4 -1/2\n",
    );
    let out = run(&["lyapunov", cfg.to_str().unwrap(), "--k=3"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
}

#[test]
fn budget_problems_exit_3() {
    let cfg = write_config(
        "budget",
        "map = affine 1/3 0\nmap = affine 1/3 2/3\np = 1/3 2/3\nn = 40\nbudget = 100\n",
    );
    let out = run(&["oracle", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn traces_csv_has_coefficient_rows() {
    let cfg = write_config("traces", THIRDS);
    let out = run(&["traces", cfg.to_str().unwrap(), "--k=3", "--format=csv", "--print-digits=20"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "level,t,tau,a,alpha");
    let zero = lines.next().unwrap();
    assert!(zero.starts_with("0,,,1.0"), "{zero}");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn workers_flag_does_not_change_output() {
    let cfg = write_config("workers", THIRDS);
    let one = stdout(&run(&["integrate", cfg.to_str().unwrap(), "--k=8", "--workers=1"]));
    let four = stdout(&run(&["integrate", cfg.to_str().unwrap(), "--k=8", "--workers=4"]));
    assert_eq!(one, four);
}
