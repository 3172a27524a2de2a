use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn witworld(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_witworld"))
        .args(args)
        .env_remove("WITWORLD_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("witworld-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn prbox_table_and_chsh() {
    let o = witworld(&["prbox"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("CHSH = 4.0000"), "{text}");
    assert_eq!(text.matches("0.5000").count(), 8);
    assert_eq!(text.matches("0.0000").count(), 8);
    let j = json_of(&witworld(&["prbox", "--json"]));
    assert_eq!(j["chsh"].as_f64(), Some(4.0));
    assert_eq!(j["best_deterministic_chsh"].as_f64(), Some(2.0));
    let table = j["table"].as_array().unwrap();
    for (xy, row) in table.iter().enumerate() {
        for (ab, p) in row.as_array().unwrap().iter().enumerate() {
            let want = if (ab >> 1) ^ (ab & 1) == (xy >> 1) & (xy & 1) { 0.5 } else { 0.0 };
            assert!((p.as_f64().unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn unot_is_not_cp() {
    let o = witworld(&["check-map", "builtin:unot2", "--test", "cp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("min Choi eigenvalue = -1.0000"));
    let j = json_of(&witworld(&["--json", "check-map", "builtin:unot2", "--test", "cp"]));
    assert_eq!(j["result"]["verdict"], "rejected");
    assert!((j["min_choi_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-10);
}

#[test]
fn unot_and_transpose_are_positive() {
    for m in ["builtin:unot2", "builtin:transpose2"] {
        let o = witworld(&["check-map", m, "--test", "positivity"]);
        assert_eq!(o.status.code(), Some(0), "{m}: {}", stdout(&o));
    }
    let o = witworld(&["check-map", "builtin:pauli-meas", "--test", "trace-preserving"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn pr_box_assemblage_is_ns_but_not_lhs() {
    let o = witworld(&["assemblage", "pr-box", "--verify-ns", "--verify-lhs"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("NS verdict: accepted"), "{text}");
    assert!(text.contains("infeasible"), "{text}");
    let j = json_of(&witworld(&["assemblage", "pr-box", "--verify-ns", "--verify-lhs", "--json"]));
    assert_eq!(j["ns"]["verdict"], "accepted");
    assert_eq!(j["lhs"]["lhs"], "infeasible");
    assert!(j["lhs"]["certificate"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn emitted_assemblage_feeds_lhs() {
    let path = scratch("prbox.json");
    let o = witworld(&["assemblage", "pr-box", "--emit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = witworld(&["lhs", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("LHS: infeasible"));
}

#[test]
fn every_named_assemblage_is_ns() {
    for name in ["pr-box", "bwi-star", "gleason", "bwi-star-star", "instrumental-star"] {
        let o = witworld(&["assemblage", name, "--verify-ns"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn witness_states() {
    for s in ["builtin:swap2", "builtin:singlet-pt", "builtin:s-pr", "builtin:singlet"] {
        let o = witworld(&["check-state", s, "--grid", "60"]);
        assert_eq!(o.status.code(), Some(0), "{s}: {}", stdout(&o));
    }
}

#[test]
fn rejected_state_prints_certificate() {
    let path = scratch("neg.json");
    std::fs::write(
        &path,
        r#"{"system": ["Q2"], "matrix": {"re": [[1.2, 0.0], [0.0, -0.2]]}}"#,
    )
    .unwrap();
    let o = witworld(&["check-state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("certificate:"));
}

#[test]
fn effect_with_certificate() {
    let path = scratch("effect.json");
    let unit = r#"{"system": ["B2,2"], "coeffs": [0.0, 0.0, 1.0]}"#;
    std::fs::write(
        &path,
        format!(
            r#"{{"effect": {{"system": ["B2,2", "B2,2"], "coeffs": [0,0,0,0,0,0,0,0,1]}},
                 "certificate": [{{"weight": 1.0, "factors": [{unit}, {unit}]}}]}}"#
        ),
    )
    .unwrap();
    let o = witworld(&["check-effect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn rsp_report() {
    let o = witworld(&["rsp", "--theta", "0.7", "--phi", "-2.0", "--grid", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bits sent = 1"));
    let j = json_of(&witworld(&["rsp", "--theta", "0.7", "--phi", "-2.0", "--json"]));
    assert_eq!(j["bits_sent"], 1);
    assert!(j["trace_distance"].as_f64().unwrap() < 1e-10);
    assert_eq!(j["branches"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(witworld(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(witworld(&["prbox", "--bogus"]).status.code(), Some(64));
    assert_eq!(witworld(&["check-map", "builtin:unot2"]).status.code(), Some(64));
    assert_eq!(witworld(&["check-map", "builtin:nope", "--test", "cp"]).status.code(), Some(64));
    assert_eq!(witworld(&["--help"]).status.code(), Some(0));

    let path = scratch("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let o = witworld(&["check-state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    std::fs::write(&path, r#"{"system": ["Q2"], "coeffs": [1.0, 2.0]}"#).unwrap();
    assert_eq!(witworld(&["check-state", path.to_str().unwrap()]).status.code(), Some(65));
    assert_eq!(witworld(&["lhs", "/definitely/not/here.json"]).status.code(), Some(65));
}

#[test]
fn inconclusive_exit_code() {
    let o = witworld(&["check-state", "builtin:ghz-pt", "--restarts", "20"]);
    assert_eq!(o.status.code(), Some(2));
    let o = witworld(&["lhs", "builtin:bwi-star"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_is_deterministic_and_agrees_with_text() {
    let args = ["--json", "check-state", "builtin:ghz-pt", "--restarts", "30", "--seed", "7"];
    let a = witworld(&args);
    let b = witworld(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = vec!["--threads", "1"];
    threaded.extend_from_slice(&args);
    assert_eq!(witworld(&threaded).stdout, a.stdout);
    let text = witworld(&args[1..]);
    assert_eq!(a.status.code(), text.status.code());
    let label = json_of(&a)["result"]["verdict"].as_str().unwrap().to_string();
    assert!(stdout(&text).contains(&format!("verdict: {label}")));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_witworld"));
        c.args(["--json", "check-state", "builtin:ghz-pt", "--restarts", "5"]);
        match seed {
            Some(s) => c.env("WITWORLD_SEED", s),
            None => c.env_remove("WITWORLD_SEED"),
        };
        c.output().unwrap()
    };
    let explicit = witworld(&["--json", "check-state", "builtin:ghz-pt", "--restarts", "5", "--seed", "11"]);
    assert_eq!(run(Some("11")).stdout, explicit.stdout);
    assert_eq!(run(Some("eleven")).status.code(), Some(64));
}
