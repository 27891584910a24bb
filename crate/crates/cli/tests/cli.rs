use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn maxclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxclass")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn build(dir: &TempDir, p: u32, n: usize) -> String {
    let path = dir.path().join(format!("g_{p}_{n}.grp"));
    let path = path.to_str().unwrap().to_string();
    let out = maxclass(&["build", "--p", &p.to_string(), "--n", &n.to_string(), "-o", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(Path::new(&path).exists());
    path
}

fn field<'a>(report: &'a toml::Table, path: &[&str]) -> &'a toml::Value {
    let mut v = report.get(path[0]).unwrap_or_else(|| panic!("missing {}", path[0]));
    for key in &path[1..] {
        v = v.get(key).unwrap_or_else(|| panic!("missing {key}"));
    }
    v
}

#[test]
fn build_then_analyze() {
    let dir = TempDir::new().unwrap();
    let path = build(&dir, 5, 7);
    let out = maxclass(&["analyze", &path]);
    assert_eq!(out.status.code(), Some(0));
    let report: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    assert_eq!(field(&report, &["result", "profile", "l"]).as_integer(), Some(4));
    assert_eq!(field(&report, &["result", "profile", "class"]).as_integer(), Some(6));
    assert_eq!(field(&report, &["result", "profile", "metabelian"]).as_bool(), Some(true));
    assert_eq!(field(&report, &["result", "consistency", "passed"]).as_bool(), Some(true));
    assert_eq!(field(&report, &["input_digest"]).as_str().unwrap().len(), 64);
}

#[test]
fn build_without_output_prints_group_file() {
    let out = maxclass(&["build", "--p", "3", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(maxclass::PcPresentation::from_file_str(&text).is_ok());
}

#[test]
fn report_embeds_version_seed_and_budgets() {
    let dir = TempDir::new().unwrap();
    let path = build(&dir, 5, 7);
    let out = maxclass(&["verify", "main1", &path, "--seed", "7", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let report: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    assert_eq!(field(&report, &["version"]).as_str(), Some(env!("CARGO_PKG_VERSION")));
    assert_eq!(field(&report, &["seed"]).as_integer(), Some(7));
    assert_eq!(field(&report, &["budgets", "samples"]).as_integer(), Some(500));
    assert_eq!(field(&report, &["result", "required_exponent"]).as_integer(), Some(8));
    assert_eq!(field(&report, &["result", "achieved_exponent"]).as_integer(), Some(10));
}

#[test]
fn verify_main2_passes() {
    let dir = TempDir::new().unwrap();
    let path = build(&dir, 5, 7);
    let out = maxclass(&["verify", "main2", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    assert_eq!(field(&report, &["result", "t"]).as_integer(), Some(4));
}

#[test]
fn main1_refuses_small_n() {
    let dir = TempDir::new().unwrap();
    let path = build(&dir, 5, 6);
    let out = maxclass(&["verify", "main1", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn inconsistent_file_exits_4() {
    let dir = TempDir::new().unwrap();
    let path = build(&dir, 5, 7);
    let text = std::fs::read_to_string(&path).unwrap();
    let corrupted = text.replacen(
        "pair = [3, 1]\ntail = [0, 0, 0, 1, 0, 0, 0]",
        "pair = [3, 1]\ntail = [0, 0, 0, 0, 1, 0, 0]",
        1,
    );
    assert_ne!(text, corrupted);
    let bad = dir.path().join("bad.grp");
    std::fs::write(&bad, corrupted).unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(maxclass(&["verify", "main1", bad]).status.code(), Some(4));
    let out = maxclass(&["analyze", bad]);
    assert_eq!(out.status.code(), Some(4));
    let report: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    assert_eq!(field(&report, &["result", "consistency", "passed"]).as_bool(), Some(false));
}

#[test]
fn malformed_file_exits_4() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.grp");
    std::fs::write(&bad, "p = 5\nn = three\n").unwrap();
    assert_eq!(maxclass(&["analyze", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(maxclass(&["build", "--p", "5", "--n", "7", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(maxclass(&["verify", "main3", "g.grp"]).status.code(), Some(1));
    assert_eq!(maxclass(&[]).status.code(), Some(1));
    assert_eq!(maxclass(&["export", "--p", "5", "--n", "7", "--model", "matrix"]).status.code(), Some(1));
    assert_eq!(maxclass(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_file_is_a_usage_error() {
    assert_eq!(maxclass(&["analyze", "/nonexistent/g.grp"]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let path = build(&dir, 5, 7);
    let a = maxclass(&["verify", "main2", &path, "--seed", "11"]);
    let b = maxclass(&["verify", "main2", &path, "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = maxclass(&["export", "--p", "5", "--n", "7", "--model", "ring", "--seed", "3"]);
    let d = maxclass(&["export", "--p", "5", "--n", "7", "--model", "ring", "--seed", "3"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn export_ring_reports_invariants() {
    let out = maxclass(&["export", "--p", "3", "--n", "5", "--model", "ring"]);
    assert_eq!(out.status.code(), Some(0));
    let report: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    let inv: Vec<i64> = field(&report, &["result", "abelian_invariants"])
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_integer().unwrap())
        .collect();
    assert_eq!(inv, vec![9, 9]);
    assert_eq!(field(&report, &["result", "cross_model", "exhaustive"]).as_bool(), Some(true));
}

#[test]
fn export_pc_writes_group_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.grp");
    let out = maxclass(&["export", "--p", "5", "--n", "6", "--model", "pc", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let pres = maxclass::PcPresentation::read(&path).unwrap();
    assert_eq!(pres.n(), 6);
    let report: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    assert_eq!(field(&report, &["result", "sigma", "order"]).as_integer(), Some(5));
}

#[test]
fn selftest_passes() {
    let out = maxclass(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
