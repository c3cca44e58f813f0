use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.display().to_string()
}

fn opcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcone")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn unit_is_in_the_cone() {
    let o = opcone(&["check", "--cone", "c", "--vector", &data("unit.json")]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["verdict"], "member");
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn heavy_vector_is_not() {
    let o = opcone(&["check", "--cone", "c", "--input", &data("outside.json")]);
    assert_eq!(code(&o), 1);
    assert!(report(&o)["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn non_hermitian_vector_has_negative_margin() {
    let o = opcone(&["check", "--cone", "c", "--vector", &data("skew.json")]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["details"]["hermitian"], false);
    assert!(r["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn shifted_example_is_hs3_but_not_psd() {
    let m = data("hs3_shifted.json");
    assert_eq!(code(&opcone(&["check", "--cone", "hs3", "--matrix", &m])), 0);
    assert_eq!(code(&opcone(&["check", "--cone", "psd", "--matrix", &m])), 1);
    let o = opcone(&["hs", "--n", "3", "--matrix", &m]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["details"]["psd"], false);
}

#[test]
fn direct_sum_of_f_is_outside_min() {
    let o = opcone(&["check", "--cone", "min", "--level", "2", "--matrix", &data("f_sum2.json")]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["verdict"], "non_member");
}

#[test]
fn max_membership_comes_with_a_certificate() {
    let o = opcone(&["check", "--cone", "max", "--matrix", &data("e_plus_f.json")]);
    assert_eq!(code(&o), 0);
    assert!(report(&o)["details"]["certificate"]["terms"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn state_commands() {
    let mu = data("measure.json");
    assert_eq!(code(&opcone(&["states", "integral", "--measure", &mu])), 0);
    assert_eq!(code(&opcone(&["states", "mass", "--input", &mu])), 0);
    assert_eq!(code(&opcone(&["states", "concentrate", "--points", &data("points.json")])), 0);
    assert_eq!(code(&opcone(&["states", "concentrate", "--points", &data("too_heavy.json")])), 1);
}

#[test]
fn pietsch_and_l2() {
    let o = opcone(&["pietsch", "--map", &data("map3.json"), "--samples", "200"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!(r["details"]["summing_norm"]["upper"].as_f64().unwrap() <= 2.0 * 2f64.sqrt());
    assert_eq!(code(&opcone(&["check", "--cone", "l2", "--function", &data("indicator.json")])), 0);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&opcone(&[])), 64);
    assert_eq!(code(&opcone(&["demo", "nope"])), 64);
    assert_eq!(code(&opcone(&["check", "--cone", "c"])), 64);
    let o = opcone(&["check", "--cone", "c", "--vector", "missing.json"]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
    assert_eq!(code(&opcone(&["--json", "--pretty", "demo", "hs3"])), 64);
    let o = opcone(&["check", "--cone", "min", "--level", "3", "--matrix", &data("f_sum2.json")]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--level 3"));
    assert_eq!(code(&opcone(&["--help"])), 0);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_opcone"))
        .args(["demo", "hs3"])
        .env("OPCONE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 64);
    let o = Command::new(env!("CARGO_BIN_EXE_opcone"))
        .args(["demo", "hs3"])
        .env("OPCONE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn demos_are_deterministic() {
    for d in ["exm11", "chi_half", "hs3", "swap", "l22_minmax", "mass_bound", "pietsch_bound"] {
        let a = opcone(&["demo", d, "--seed", "3"]);
        assert_eq!(code(&a), 0, "{d}: {}", String::from_utf8_lossy(&a.stderr));
        let b = opcone(&["demo", d, "--seed", "3"]);
        let (mut ra, mut rb) = (report(&a), report(&b));
        ra["elapsed_ms"] = Value::Null;
        rb["elapsed_ms"] = Value::Null;
        assert_eq!(ra, rb, "{d}");
    }
}

#[test]
fn sine_demo_reports_the_failed_lower_bound() {
    let o = opcone(&["demo", "sin_support"]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    let failed: Vec<_> = r["checks"].as_array().unwrap().iter().filter(|c| c["ok"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0]["claim"].as_str().unwrap().contains("unweighted series"));
}
