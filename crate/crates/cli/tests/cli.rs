use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bratteli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).expect("valid JSON")
}

/// Compares with `tests/golden/<name>`; set `BLESS=1` to rewrite.
fn golden(name: &str, args: &[&str]) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let got = stdout(&o);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &got).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert_eq!(got, want, "output differs from {name}");
}

#[test]
fn analyze_goldens() {
    for f in [
        "example1",
        "example3_n3",
        "example3_n4",
        "example3_n5",
        "witness_p",
        "fibonacci",
        "single",
    ] {
        golden(&format!("analyze_{f}.json"), &["analyze", "--json", &fixture(&format!("{f}.json"))]);
    }
    golden("analyze_example1.txt", &["analyze", &fixture("example1.json")]);
}

#[test]
fn query_goldens() {
    let ex1 = fixture("example1.json");
    golden("member_example1_third.json", &["member", &ex1, "--class", "1", "--value", "1/3", "--json"]);
    golden("member_example1_fifth.json", &["member", &ex1, "--class", "1", "--value", "1/5", "--json"]);
    golden("member_example1_irrational.json", &["member", &ex1, "--class", "0", "--value", "3 - l", "--json"]);
    golden("good_example3_n4.json", &["good", &fixture("example3_n4.json"), "--class", "1", "--json"]);
    golden("enumerate_example1_level2.json", &["enumerate", &ex1, "--class", "1", "--level", "2", "--json"]);
    golden(
        "equal_n4_witness.json",
        &["equal", &fixture("example3_n4.json"), "--class-a", "1", &fixture("witness_p.json"), "--class-b", "0", "--json"],
    );
    golden("construct_rational_4_3_0.json", &["construct", "rational", "--q", "4", "--lambda", "3", "--json"]);
    golden("construct_simplify_n4.json", &["construct", "simplify", &fixture("example3_n4.json"), "--class", "1", "--json"]);
}

#[test]
fn analyze_reports_measures() {
    let r = json(&["analyze", "--json", &fixture("example1.json")]);
    let ms = r["measures"].as_array().unwrap();
    assert_eq!(ms.len(), 2);
    assert!(ms.iter().all(|m| m["goodness"]["good"] == Value::Bool(true)));
    let r = json(&["analyze", "--json", &fixture("example3_n4.json")]);
    let g = &r["measures"][1]["goodness"];
    assert_eq!(g["good"], Value::Bool(false));
    assert_eq!(g["residual"].to_string(), "3");
    let r = json(&["analyze", "--json", &fixture("single.json")]);
    assert_eq!(r["measures"][0]["lambda"]["exact"], Value::String("2".into()));
    assert_eq!(r["measures"][0]["goodness"]["good"], Value::Bool(true));
}

#[test]
fn answers_and_equality() {
    let ex1 = fixture("example1.json");
    let m = json(&["member", &ex1, "--class", "1", "--value", "1/3", "--json"]);
    assert_eq!(m["member"], Value::Bool(true));
    let g = json(&["good", &fixture("example3_n5.json"), "--class", "1", "--json"]);
    assert_eq!(g["good"], Value::Bool(true));
    let e = json(&[
        "equal",
        &fixture("example3_n4.json"),
        "--class-a",
        "1",
        &fixture("witness_p.json"),
        "--class-b",
        "0",
        "--json",
    ]);
    assert_eq!(e["equal"], Value::Bool(true));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["analyze", "--json", "fixtures/example1.json"];
    let a = Command::new(env!("CARGO_BIN_EXE_bratteli")).args(args).current_dir(root()).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_bratteli")).args(args).current_dir(root()).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let ex1 = fixture("example1.json");
    let missing = run(&["analyze", &fixture("missing.json")]);
    assert_eq!(missing.status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("bratteli-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"incidence": [[0, 1], [0, 1]]}"#).unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 0 is zero"));
    assert_eq!(run(&["good", &ex1, "--class", "9"]).status.code(), Some(2));
    assert_eq!(run(&["member", &ex1, "--class", "1", "--value", "l"]).status.code(), Some(2));
    assert_eq!(run(&["member", &ex1, "--class", "1", "--value", "1/"]).status.code(), Some(2));
    let r = run(&["construct", "extend", &ex1, "--class", "1"]);
    assert_eq!(r.status.code(), Some(2));
    let s = run(&["construct", "extend", &fixture("fibonacci.json"), "--class", "0", "--coeff-bound", "1"]);
    assert_eq!(s.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&s.stderr).contains("search failed"));
}

#[test]
fn construction_writes_sidecar() {
    let dir = std::env::temp_dir().join(format!("bratteli-out-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let out = dir.join("family.json");
    let o = run(&["construct", "rational", "--q", "2", "--lambda", "2", "--i", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let d: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(d["incidence"].as_array().unwrap().len(), 8);
    let side: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("family.verification.json")).unwrap()).unwrap();
    assert_eq!(side["verification"]["all_ok"], Value::Bool(true));
    let back = json(&["analyze", "--json", out.to_str().unwrap()]);
    assert_eq!(back["minimal_components"].to_string(), "1");
}

#[test]
fn extension_reports_its_verification() {
    let o = run(&["construct", "extend", &fixture("fibonacci.json"), "--class", "0", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ver = &v["verification"];
    assert_eq!(ver["group_equal"], Value::Bool(true));
    assert_eq!(ver["is_good"], Value::Bool(true));
    assert_eq!(ver["eigen_identity"], Value::Bool(true));
    assert_eq!(v["diagram"]["incidence"].as_array().unwrap().len(), 3);
    // Exit status follows the full record, including the minimal-component count.
    let ok = ver["all_ok"] == Value::Bool(true);
    assert_eq!(o.status.code(), Some(if ok { 0 } else { 1 }));
}
