use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use couplex_core::guessing::best_function_exact;
use couplex_core::io::{parse_dist, to_json};
use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("couplex-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::write(&p, body).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

const P: &str = r#"{"alphabet":["a","b"],"probs":[0.5,0.5]}"#;
const Q: &str = r#"{"alphabet":["a","b"],"probs":[0.25,0.75]}"#;

fn couplex<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_couplex")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn chernoff_in_bits() {
    let s = Scratch::new("chernoff");
    let (p, q) = (s.file("p.json", P), s.file("q.json", Q));
    let v = json(&couplex(["dist", "chernoff", "--p", arg(&p), "--q", arg(&q), "--base", "2"]));
    let c = v["chernoff"].as_f64().unwrap();
    assert!((c - 0.0500444728117).abs() < 1e-10, "{c}");
}

#[test]
fn scan_csv_header_and_rows() {
    let s = Scratch::new("scan");
    let (p, q) = (s.file("p.json", P), s.file("q.json", Q));
    let out = couplex(["guess", "scan", "--px", arg(&p), "--py", arg(&q), "--n", "1..4", "--exact", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,G_lower,G_exact,H_inf_c,fano_Hc_upper"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("1,0.75,0.75,"));
}

#[test]
fn output_matches_library_serialisation() {
    let s = Scratch::new("lib");
    let (p, q) = (s.file("p.json", P), s.file("q.json", Q));
    let out = couplex(["guess", "exact", "--px", arg(&p), "--py", arg(&q)]);
    assert!(out.status.success());
    let px = parse_dist(P, false).unwrap();
    let py = parse_dist(Q, false).unwrap();
    let expected = to_json(&best_function_exact(&px, &py).unwrap()).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), expected.trim_end());
}

#[test]
fn out_flag_writes_file() {
    let s = Scratch::new("out");
    let (p, q) = (s.file("p.json", P), s.file("q.json", Q));
    let dest = s.0.join("tv.json");
    let out = couplex(["dist", "tv", "--p", arg(&p), "--q", arg(&q), "--out", arg(&dest)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["tv"].as_f64(), Some(0.25));
}

#[test]
fn stealth_check_reports_mod2_redundancy() {
    let s = Scratch::new("stealth");
    let wy = s.file(
        "wy.json",
        r#"{"input":["0","1","2","3"],"output":["0","1","2","3"],
            "rows":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#,
    );
    let wz = s.file(
        "wz.json",
        r#"{"input":["0","1","2","3"],"output":["0","1"],
            "rows":[[1,0],[0,1],[1,0],[0,1]]}"#,
    );
    let pz = s.file("pz.json", r#"{"alphabet":["0","1"],"probs":[0.5,0.5]}"#);
    let v = json(&couplex(["stealth", "check", "--wy", arg(&wy), "--wz", arg(&wz), "--pz", arg(&pz)]));
    assert_eq!(v["redundant"], Value::Bool(true));
    assert!(v["witness_pair"].is_array());
}

#[test]
fn missing_subcommand_exits_64() {
    assert_eq!(couplex(["dist"]).status.code(), Some(64));
    assert_eq!(couplex(["frobnicate"]).status.code(), Some(64));
}

#[test]
fn unreadable_input_exits_66() {
    let s = Scratch::new("missing");
    let q = s.file("q.json", Q);
    let out = couplex(["dist", "tv", "--p", arg(&s.0.join("nope.json")), "--q", arg(&q)]);
    assert_eq!(out.status.code(), Some(66));
    assert_eq!(error(&out)["exit_code"], 66);
}

#[test]
fn cap_overflow_exits_69() {
    let s = Scratch::new("cap");
    let (p, q) = (s.file("p.json", P), s.file("q.json", Q));
    let out = couplex(["guess", "exact", "--px", arg(&p), "--py", arg(&q), "--cap", "1"]);
    assert_eq!(out.status.code(), Some(69));
    assert_eq!(error(&out)["error"], "TooLarge");
}

#[test]
fn invalid_distribution_exits_2_unless_normalised() {
    let s = Scratch::new("invalid");
    let p = s.file("p.json", r#"{"alphabet":["a","b"],"probs":[1,3]}"#);
    let q = s.file("q.json", Q);
    let out = couplex(["dist", "tv", "--p", arg(&p), "--q", arg(&q)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error(&out)["exit_code"], 2);

    let v = json(&couplex(["dist", "tv", "--p", arg(&p), "--q", arg(&q), "--normalize"]));
    assert!(v["tv"].as_f64().unwrap().abs() < 1e-12);
}
