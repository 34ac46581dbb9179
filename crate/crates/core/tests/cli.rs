use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relcrypt"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn relcrypt")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn bundled_scenarios_pass() {
    for entry in std::fs::read_dir(scenario("")).unwrap() {
        let path = entry.unwrap().path();
        let out = run(&["run", "--scenario", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn channel_coin_flip_reports_exact_zeros() {
    let out = run(&["verify", "construct-cf"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let cases = v["result"]["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 3);
    for c in cases {
        assert_eq!(c["advantage"], "0/1");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for target in [&a, &b] {
        let out = run(&[
            "run",
            "--scenario",
            scenario("mitm_p0.json").to_str().unwrap(),
            "--mc-n",
            "2000",
            "--rng-seed",
            "42",
            "--out",
            target.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
    let epr = || run(&["run", "--scenario", scenario("epr.json").to_str().unwrap()]).stdout;
    assert_eq!(epr(), epr());
}

#[test]
fn malformed_point_is_a_parse_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let text = "{\n  \"name\": \"bad\",\n  \"kind\": \"construct_cf\",\n  \"geometry\": {\"cd\": {\"p\": {\"t\": \"zero\"}}}\n}\n";
    let path = write(dir.path(), "bad.json", text);
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:4:"), "{err}");
}

#[test]
fn meeting_point_outside_the_region_is_a_geometry_error() {
    let dir = tempfile::tempdir().unwrap();
    let pt = |t: &str| format!("{{\"t\": \"{t}\", \"x\": [\"0\", \"0\", \"0\"]}}");
    let text = format!(
        "{{\"name\": \"outside\", \"kind\": \"construct_cf\", \"geometry\": {{\"cd\": {{\"p\": {}, \"p_prime\": {}, \"q_prime\": {}, \"q\": {}, \"alphabet\": [\"0\", \"1\"]}}, \"meet\": {}, \"out_a\": {}, \"out_b\": {}}}}}",
        pt("0"),
        pt("1"),
        pt("3"),
        pt("4"),
        pt("7/2"),
        pt("5"),
        pt("5")
    );
    let path = write(dir.path(), "outside.json", &text);
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the trusted region"));
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"name": "wrong", "kind": "mitm", "p": "1/4", "assertions": ["agreement == 1/2"]}"#;
    let path = write(dir.path(), "wrong.json", text);
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(run(&["run", "--scenario", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(run(&["attack", "mitm", "--p", "one half"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn mitm_sweep_csv() {
    let out = run(&["attack", "mitm", "--sweep", "1/4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..3], ["p", "agreement", "advantage"]);
    let rows: Vec<Vec<String>> = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    let agreements: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(agreements, ["1/2", "5/8", "3/4", "7/8", "1/1"]);
}

#[test]
fn empty_sweep_grid_gives_header_only() {
    let out = run(&["sweep", "--scenario", scenario("mitm_sweep.json").to_str().unwrap(), "--grid", "", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
}

#[test]
fn delay_extension_sweep_over_alphabet_size() {
    let out = run(&[
        "sweep",
        "--scenario",
        scenario("delay_extension.json").to_str().unwrap(),
        "--param",
        "k",
        "--grid",
        "2,3,4",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let adv: Vec<String> = rdr.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(adv, ["1/2", "2/3", "3/4"]);
}

#[test]
fn verify_subcommands() {
    for args in [
        vec!["verify", "cuts", "--posets", "30", "--max-points", "8"],
        vec!["verify", "causality"],
        vec!["verify", "epr-distinguisher", "--dim", "3"],
        vec!["attack", "delay-extension", "--k", "3"],
        vec!["attack", "mitm", "--p", "1/2", "--candidate", "direct_message"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["passed"], true, "{args:?}");
    }
}
