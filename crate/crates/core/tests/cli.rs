use std::path::PathBuf;
use std::process::{Command, Output};

use gtl::graded::WindowedGradedAlgebra;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn gtl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtl")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    gtl(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    serde_json::from_slice(&gtl(&all).stdout).expect("json output")
}

#[test]
fn analyze_examples() {
    assert_eq!(code(&["analyze", "--alg", &data("laurent.json"), "--n", "0"]), 0);
    let out = gtl(&["analyze", "--alg", &data("corrupted.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"), "parse errors carry a location");
    assert_eq!(code(&["analyze", "--alg", &data("trivext2.json"), "--n", "-1", "--r", "w1", "--rtilde", "w2", "--depth2"]), 0);
}

#[test]
fn analyze_rejections() {
    // n >= 0 violates a hypothesis of the depth-2 check
    assert_eq!(code(&["analyze", "--alg", &data("trivext2.json"), "--n", "0", "--r", "w1", "--rtilde", "w2", "--depth2"]), 3);
    assert_eq!(code(&["analyze", "--alg", &data("trivext2.json"), "--n", "-1", "--r", "nope", "--depth1"]), 2);
    assert_eq!(code(&["analyze", "--alg", &data("missing.json")]), 2);
    assert_eq!(code(&["analyze"]), 2);
}

#[test]
fn analyze_reports_failures() {
    // A^1 . A^{-1} = 0 in the trivial extension, so the degree 0 pairing is degenerate
    let args = ["analyze", "--alg", &data("trivext2.json"), "--n", "0"];
    assert_eq!(code(&args), 1);
    let mut with_json = vec!["--json"];
    with_json.extend_from_slice(&args);
    let v = json(&args);
    assert_eq!(v["check"], "analyze");
    assert_eq!(gtl(&with_json).status.code(), Some(1));
}

#[test]
fn tate_examples() {
    let v = json(&["tate", "--truncated", "2,2", "--char", "2", "--window", "-3,3"]);
    let mut dims: Vec<(i32, u64)> =
        v["dims"].as_object().unwrap().iter().map(|(k, x)| (k.parse().unwrap(), x.as_u64().unwrap())).collect();
    dims.sort();
    let dims: Vec<u64> = dims.into_iter().map(|(_, d)| d).collect();
    assert_eq!(dims, vec![3, 2, 1, 1, 2, 3, 4]);
    for a in ["2", "3"] {
        let v = json(&["tate", "--truncated", a, "--char", "2", "--hochschild", "--window", "-2,2"]);
        assert!(v["dims"].as_object().unwrap().values().all(|x| x == 2), "a = {a}");
        assert!(v["duality"]["functional"].is_array());
    }
}

#[test]
fn tate_inputs() {
    assert_eq!(code(&["tate", "--alg", &data("k4.json"), "--window", "-2,2"]), 0);
    assert_eq!(code(&["tate", "--alg", &data("x3.json"), "--window", "-2,2"]), 0);
    assert_eq!(code(&["tate", "--alg", &data("k4_nosym.json"), "--window", "-2,2"]), 3);
    assert_eq!(code(&["tate", "--truncated", "2", "--char", "4"]), 2);
    assert_eq!(code(&["tate", "--truncated", "2", "--char", "2", "--window", "-40,0"]), 2);
    assert_eq!(code(&["tate", "--truncated", "2", "--char", "2", "--window", "-3,3", "--depth", "2"]), 2);
    assert_eq!(code(&["tate", "--truncated", "2"]), 2);
}

#[test]
fn tate_output_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.json");
    let p = path.display().to_string();
    assert_eq!(code(&["tate", "--truncated", "2,2", "--char", "2", "--window", "-3,3", "--out", &p]), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let ring = WindowedGradedAlgebra::from_json(&text).unwrap();
    assert_eq!(ring.to_json(), text);
    assert_eq!(code(&["analyze", "--alg", &p, "--n", "-1"]), 0);
    assert_eq!(code(&["analyze", "--alg", &p, "--n", "-1", "--r", "e[2][0]", "--rtilde", "e[2][2]", "--depth2"]), 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "tate", "--truncated", "3", "--char", "3", "--window", "-3,3", "--seed", "5"];
    let a = gtl(&args).stdout;
    let b = gtl(&args).stdout;
    assert_eq!(a, b);
    let single = Command::new(env!("CARGO_BIN_EXE_gtl")).args(args).env("GTL_THREADS", "1").output().unwrap();
    assert_eq!(single.stdout, a);
    let bad = Command::new(env!("CARGO_BIN_EXE_gtl")).args(args).env("GTL_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reproduce_names() {
    for name in ["hh-truncated", "klein-four", "trivial-extension", "ci-ext-dims", "hypersurface-periodic", "gorenstein0"] {
        let out = gtl(&["--json", "reproduce", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["all_match"], true);
    }
    assert_eq!(code(&["reproduce", "unknown"]), 2);
}
