use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fsynth::Format;
use tempfile::TempDir;

fn fsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsynth"))
        .args(args)
        .env_remove("FSYNTH_SEED")
        .env_remove("FSYNTH_TIMEOUT_SECS")
        .output()
        .expect("run fsynth")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn file(dir: &TempDir, name: &str, bytes: &[u8]) -> String {
    let p = path(dir, name);
    fs::write(&p, bytes).unwrap();
    p
}

#[test]
fn repair_inserts_the_missing_comma() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "broken.json", br#"{ "name": "Dave" "age": 42 }"#);
    let (out, report) = (path(&dir, "fixed.json"), path(&dir, "report.json"));
    let run = fsynth(&["repair", "--format", "json", "--in", &input, "--out", &out, "--report", &report]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(run.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), br#"{ "name": "Dave" ,"age": 42 }"#);

    let report: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let repairs = report["repairs"].as_array().unwrap();
    assert_eq!(repairs[0]["edits"], 1);
    assert_eq!(repairs[0]["text"], r#"{ "name": "Dave" ,"age": 42 }"#);
    let edits: Vec<u64> = repairs.iter().map(|r| r["edits"].as_u64().unwrap()).collect();
    assert!(edits.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn repair_of_valid_input_is_identity() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "ok.json", b"[1, {\"a\": null}]");
    let report = path(&dir, "report.json");
    let run = fsynth(&["repair", "--format", "json", "--in", &input, "--out", "-", "--report", &report]);
    assert!(run.status.success());
    assert_eq!(run.stdout, b"[1, {\"a\": null}]");
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(report["repairs"][0]["edits"], 0);
}

#[test]
fn unknown_format_fails_before_reading() {
    let run = fsynth(&["repair", "--format", "nosuch", "--in", "/does/not/exist"]);
    assert_eq!(run.status.code(), Some(1));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("nosuch"), "{err}");
    assert!(!err.contains("/does/not/exist"), "{err}");
}

#[test]
fn exhausted_budget_exits_two() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "broken.json", br#"{"ABCD":[*"1,2,3,4,5,6"]*}"#);
    let out = path(&dir, "fixed.json");
    let run = fsynth(&["repair", "--format", "json", "--in", &input, "--out", &out, "--budget", "3"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!Path::new(&out).exists());
}

#[test]
fn timeout_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "broken.json", br#"{ "name": "Dave" "age": 42 }"#);
    let run = Command::new(env!("CARGO_BIN_EXE_fsynth"))
        .args(["repair", "--format", "json", "--in", &input])
        .env("FSYNTH_TIMEOUT_SECS", "0")
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
    // the flag wins over the environment
    let run = Command::new(env!("CARGO_BIN_EXE_fsynth"))
        .args(["repair", "--format", "json", "--in", &input, "--timeout", "30"])
        .env("FSYNTH_TIMEOUT_SECS", "0")
        .output()
        .unwrap();
    assert!(run.status.success());
}

#[test]
fn oracle_exit_codes() {
    let dir = TempDir::new().unwrap();
    for (bytes, word, code) in [(&b"["[..], "incomplete", 3), (b"[]", "complete", 0), (b"]", "incorrect", 4)] {
        let input = file(&dir, "in.json", bytes);
        let run = fsynth(&["oracle", "--format", "json", "--in", &input]);
        assert_eq!(run.status.code(), Some(code));
        assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), word);
    }
}

#[test]
fn ddmax_writes_the_empty_result() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "in.json", b"[*]+");
    let out = path(&dir, "out.json");
    let run = fsynth(&["ddmax", "--format", "json", "--in", &input, "--out", &out]);
    assert_eq!(fs::read(&out).unwrap(), b"");
    // the empty JSON input does not parse
    assert_eq!(run.status.code(), Some(1));

    let input = file(&dir, "in.ini", b"[");
    let out = path(&dir, "out.ini");
    let run = fsynth(&["ddmax", "--format", "ini", "--in", &input, "--out", &out]);
    assert!(run.status.success());
    assert!(Format::Ini.classify(&fs::read(&out).unwrap()).is_complete());

    let input = file(&dir, "one.json", b"1*1");
    let run = fsynth(&["ddmax", "--format", "json", "--in", &input, "--out", "-"]);
    assert!(run.status.success());
    assert_eq!(run.stdout, b"11");
}

#[test]
fn mutate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "valid.json", br#"{"a": [1, 2, 3], "b": "text"}"#);
    let run_with = |name: &str, seed: Option<&str>, env_seed: Option<&str>| {
        let out = path(&dir, name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fsynth"));
        cmd.args(["mutate", "--format", "json", "--in", &input, "--out", &out, "--n", "1"]);
        cmd.env_remove("FSYNTH_SEED");
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        if let Some(s) = env_seed {
            cmd.env("FSYNTH_SEED", s);
        }
        assert!(cmd.status().unwrap().success());
        fs::read(out).unwrap()
    };
    let a = run_with("a", Some("7"), None);
    assert_eq!(a, run_with("b", Some("7"), None));
    assert!(!Format::Json.classify(&a).is_complete());
    assert_eq!(a, run_with("c", None, Some("7")));
    assert_eq!(run_with("d", Some("8"), Some("7")), run_with("e", Some("8"), None));
}

#[test]
fn mutate_writes_a_sidecar() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "valid.ini", b"[a]\nk=v\n");
    let (out, meta) = (path(&dir, "m.ini"), path(&dir, "m.meta.json"));
    let run = fsynth(&["mutate", "--format", "ini", "--in", &input, "--out", &out, "--n", "3", "--seed", "4", "--meta", &meta]);
    assert!(run.status.success());
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(meta).unwrap()).unwrap();
    assert_eq!(meta["n_mutations"], 3);
    assert_eq!(meta["mutations"].as_array().unwrap().len(), 3);
    assert_eq!(meta["position_sampling"], "uniform");
}

#[test]
fn bench_reports_one_line_per_file_and_strategy() {
    let dir = TempDir::new().unwrap();
    let corpus = path(&dir, "corpus");
    let run = fsynth(&["mutate", "--corpus", &corpus, "--formats", "json,ini", "--per-format", "3", "--seed", "5"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for set in ["valid", "single", "multi"] {
        assert_eq!(fs::read_dir(dir.path().join("corpus/json").join(set)).unwrap().count(), if set == "valid" { 3 } else { 6 });
    }

    let report = path(&dir, "report.jsonl");
    let run = fsynth(&["bench", "--corpus", &corpus, "--strategies", "fsynth,ddmax", "--out", &report, "--jobs", "2"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&report).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // 2 formats x 3 files x 2 sets x 2 strategies
    assert_eq!(lines.len(), 24);
    for l in &lines {
        for key in ["file_id", "strategy", "status", "edit_distance", "recovery_pct", "oracle_runs", "wall_ms"] {
            assert!(l.get(key).is_some(), "{key} missing in {l}");
        }
    }
    let table = String::from_utf8_lossy(&run.stdout);
    assert!(table.contains("ddmax") && table.contains("fsynth"), "{table}");

    let run = fsynth(&["bench", "--corpus", &corpus, "--strategies", "nosuch"]);
    assert_eq!(run.status.code(), Some(1));
}
