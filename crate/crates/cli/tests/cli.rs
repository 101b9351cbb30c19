use std::path::Path;
use std::process::{Command, Output};

use hankel_kothe::Certificate;

fn hankel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankel")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    hankel(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(hankel(args).stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: String) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const GAUSS_COMPACT: [&str; 10] = ["certify", "--op", "hankel", "--symbol", "gauss", "--domain", "Linf:linear", "--codomain", "Linf:linear", "--compact"];

#[test]
fn sequence_checks_exit_codes() {
    assert_eq!(code(&["seq", "stability", "--family", "linear"]), 0);
    assert_eq!(code(&["seq", "stability", "--family", "log"]), 0);
    assert_eq!(code(&["seq", "dominate", "--kind", "C1", "--alpha", "linear", "--beta", "linear", "--a", "1", "--b", "1"]), 0);
    let dir = tempfile::tempdir().unwrap();
    let exp = write(dir.path(), "exp.csv", (1..=40).map(|n| format!("{:e}\n", (n as f64).exp())).collect());
    assert_eq!(code(&["seq", "stability", "--family", &format!("table:@{exp}:ext=ratio"), "--window", "1:40"]), 1);
}

#[test]
fn certify_exit_codes() {
    assert_eq!(code(&GAUSS_COMPACT), 0);
    assert_eq!(code(&["certify", "--op", "hankel", "--symbol", "ones", "--domain", "Linf:linear", "--codomain", "Linf:linear"]), 1);
    assert_eq!(code(&["certify", "--op", "toeplitz", "--symbol", "delta", "--domain", "Linf:linear", "--codomain", "Linf:linear", "--compact"]), 1);
}

#[test]
fn non_montel_codomain_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = std::iter::once("n,k,logweight\n".to_string())
        .chain((1..=64).flat_map(|n| (1..=8).map(move |k| format!("{n},{k},{k}\n"))))
        .collect();
    let space = format!("kothe:@{}", write(dir.path(), "k.csv", body));
    let out = hankel(&["certify", "--op", "hankel", "--symbol", "gauss", "--domain", &space, "--codomain", &space, "--compact", "--n-max", "64", "--j-max", "64"]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Montel"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["certify", "--op", "hankel", "--symbol", "gauss", "--domain", "L2:linear", "--codomain", "Linf:linear"]), 64);
    assert_eq!(code(&["certify", "--op", "hankel", "--symbol", "gauss", "--domain", "Linf:linear", "--codomain", "Linf:linear", "--k-max", "0"]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["suite", "run", "T9"]), 64);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn shipped_suites() {
    let out = hankel(&["suite", "run", "T1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    // Λ₁(log) is not stable, so every case is skipped
    let out = hankel(&["suite", "run", "T3", "--alpha", "log", "--beta", "log"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("SKIP"));
    assert_eq!(code(&["suite", "run", "oracle", "--cases", "20"]), 0);
}

#[test]
fn certificate_json_round_trips() {
    let mut args = vec!["--seed", "17"];
    args.extend(GAUSS_COMPACT);
    let text = stdout(&args);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["seed"], 17);
    let cert = Certificate::from_json(&text).unwrap();
    cert.validate().unwrap();
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let mut args = GAUSS_COMPACT.to_vec();
        let path = p.display().to_string();
        args.extend(["-o", &path]);
        assert_eq!(code(&args), 0);
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    let mut args = vec!["--workers", "1"];
    args.extend(GAUSS_COMPACT);
    assert_eq!(stdout(&args), stdout(&GAUSS_COMPACT));
}

#[test]
fn csv_output_has_header() {
    let mut args = vec!["--format", "csv"];
    args.extend(GAUSS_COMPACT);
    let text = stdout(&args);
    assert_eq!(text.lines().next(), Some("k,m,n_star,log_ratio"));
}
