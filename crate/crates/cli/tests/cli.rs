use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value as Json;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn mast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mast")).args(args).output().expect("mast runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Json {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(name: &str) -> String {
    corpus(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mast-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn walk_decision_golden() {
    let o = mast(&["walk", "walk{0:1/2,2:1/3}", "--ast"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "AST: true; kill=1/6; drift=-1/6\n");
    let o = mast(&["walk", "walk{0:1/3,2:2/3}", "--ast", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["ast"], Json::Bool(false));
    assert_eq!(j["drift"], "1/3");
    assert_eq!(j["schema_version"], 1);
}

#[test]
fn corpus_exit_codes() {
    for name in ["bias", "unb", "exp", "dbl"] {
        let o = mast(&["check", &path(&format!("{name}.lop"))]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("AST certified\n"));
        let o = mast(&["certify", &path(&format!("{name}.lop")), "--cert", &path(&format!("{name}.cert.json"))]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("AST certified\n"));
    }
    let o = mast(&["check", &path("naff.lop")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("AffinityViolation(f) in rule Let at 3:27"), "{}", stdout(&o));
}

#[test]
fn rejections_carry_rule_and_position_in_json() {
    let j = json(&mast(&["check", &path("naff.lop"), "--format", "json"]));
    assert_eq!(j["status"], "rejected");
    assert_eq!(j["error"]["kind"], "AffinityViolation(f)");
    assert_eq!(j["error"]["rule"], "Let");
    assert_eq!((j["error"]["line"].as_u64(), j["error"]["col"].as_u64()), (Some(3), Some(27)));
}

#[test]
fn certificates_are_tied_to_their_program() {
    let o = mast(&["certify", &path("exp.lop"), "--cert", &path("bias.cert.json")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not this program"));
}

#[test]
fn tampered_certificates_are_rejected() {
    let text = std::fs::read_to_string(corpus("bias.cert.json")).unwrap();
    // the recursive walk {0:2/3, 2:1/3} becomes {0:1/3, 2:2/3}, which drifts up
    let tampered = text.replace("2/3", "X").replace("1/3", "2/3").replace("X", "1/3");
    assert_ne!(tampered, text);
    let file = scratch("tampered.cert.json");
    std::fs::write(&file, tampered).unwrap();
    let o = mast(&["certify", &path("bias.lop"), "--cert", &file.display().to_string()]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains(" in rule "));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(code(&mast(&["check", "/nonexistent/x.lop"])), 2);
    let bad = scratch("bad.lop");
    std::fs::write(&bad, "-- comment\n0 ) 0\n").unwrap();
    let o = mast(&["check", &bad.display().to_string()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("parse error at 2:3"), "{err}");
    let junk = scratch("junk.cert.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&mast(&["certify", &path("bias.lop"), "--cert", &junk.display().to_string()])), 2);
    assert_eq!(code(&mast(&["certify", &path("bias.lop")])), 2);
    assert_eq!(code(&mast(&["walk", "walk{0:2/3,2:2/3}"])), 2);
    assert_eq!(code(&mast(&["walk", "walk{0:1/2}", "--hitting", "0"])), 2);
    assert_eq!(code(&mast(&["sample", &path("bias.lop"), "--format", "json"])), 2);
    assert_eq!(code(&mast(&["frobnicate"])), 2);
}

#[test]
fn elaborated_certificates_validate() {
    let o = mast(&["certify", "--elaborate", &path("unb.lop")]);
    assert_eq!(code(&o), 0);
    let cert: Json = serde_json::from_slice(&o.stdout).unwrap();
    assert!(cert.is_object());
    let file = scratch("unb.cert.json");
    std::fs::write(&file, &o.stdout).unwrap();
    let o = mast(&["certify", &path("unb.lop"), "--cert", &file.display().to_string()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let written = scratch("exp.cert.json");
    let o = mast(&["certify", "--elaborate", &path("exp.lop"), "--cert", &written.display().to_string()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(written).unwrap(), std::fs::read_to_string(corpus("exp.cert.json")).unwrap());
}

#[test]
fn check_reports_the_recursive_walk() {
    let j = json(&mast(&["check", &path("bias.lop"), "--format", "json"]));
    assert_eq!(j["status"], "certified");
    let rec = &j["letrecs"][0];
    assert_eq!(rec["walk"], "walk{0:2/3, 2:1/3}");
    assert_eq!(rec["drift"], "-1/3");
    assert_eq!(rec["kill"], "0");
    let j = json(&mast(&["check", &path("exp.lop"), "--format", "json"]));
    assert_eq!(j["letrecs"][0]["kill"], "1/2");
}

#[test]
fn horizons_are_exact() {
    let o = mast(&["walk", "walk{0:2/3,2:1/3}", "--horizon", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    // Pr_3 = 2/3 + (1/3)(2/3)(2/3)
    assert_eq!(stdout(&o), "n,probability\n0,0\n1,2/3\n2,2/3\n3,22/27\n");
    let j = json(&mast(&["walk", "walk{0:2/3,2:1/3}", "--horizon", "2", "--from", "2", "--format", "json"]));
    assert_eq!(j["horizon"]["table"][2]["probability"], "4/9");
}

#[test]
fn hitting_bracket_contains_one_half() {
    let j = json(&mast(&["walk", "walk{0:1/3,2:2/3}", "--hitting", "1/1000000000", "--format", "json"]));
    let num = |s: &Json| {
        let (a, b) = s.as_str().unwrap().split_once('/').unwrap();
        a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap()
    };
    let (lo, hi) = (num(&j["hitting"]["lower"]), num(&j["hitting"]["upper"]));
    assert!(lo <= 0.5 && 0.5 <= hi && hi - lo <= 1e-9, "[{lo}, {hi}]");
}

#[test]
fn eval_gives_the_geometric_masses() {
    let j = json(&mast(&["eval", &path("exp.lop"), "--steps", "200", "--format", "json"]));
    for n in 0..=10u32 {
        assert_eq!(j["numerals"][n.to_string()], format!("1/{}", 1u64 << (n + 1)));
    }
    let o = mast(&["eval", &path("dbl.lop"), "--format", "csv"]);
    assert_eq!(stdout(&o), "value,numeral,mass\n6,6,1\n");
}

#[test]
fn json_output_is_reproducible() {
    for args in [
        vec!["sample", "--seed", "5", "--trials", "500"],
        vec!["check"],
        vec!["eval", "--steps", "50"],
    ] {
        let mut full = args.clone();
        let file = path("bias.lop");
        full.insert(1, &file);
        full.extend(["--format", "json"]);
        let a = mast(&full);
        let b = mast(&full);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(json(&a)["schema_version"], 1);
    }
}

#[test]
fn sampling_reports_frequencies_with_counts() {
    let j = json(&mast(&["sample", &path("exp.lop"), "--seed", "3", "--trials", "1000", "--format", "json"]));
    assert_eq!(j["trials"], 1000);
    assert_eq!(j["terminated"], 1000);
    assert_eq!(j["termination_frequency"], "1.000000");
    let total: u64 = j["values"].as_array().unwrap().iter().map(|v| v["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 1000);
}

#[test]
fn traces_check_through_the_cli() {
    let o = mast(&["trace", &path("zero_choice.trace.json")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("{Nat[s+1] ^ 1/2, Nat[s+2] ^ 1/2}"));
    let text = std::fs::read_to_string(corpus("zero_choice.trace.json")).unwrap();
    let mut j: Json = serde_json::from_str(&text).unwrap();
    let entries = j.pointer_mut("/trace/1").and_then(Json::as_array_mut).expect("trace layout");
    entries.pop();
    let file = scratch("dropped.trace.json");
    std::fs::write(&file, j.to_string()).unwrap();
    let o = mast(&["trace", &file.display().to_string()]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("TraceViolation(1, "), "{}", stdout(&o));
}
