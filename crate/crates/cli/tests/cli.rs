use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn fixture(name: &str) -> String {
  PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn schema(name: &str) -> Value {
  let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
  serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn steinhc(args: &[&str]) -> Output { Command::new(env!("CARGO_BIN_EXE_steinhc")).args(args).output().unwrap() }

fn steinhc_stdin(args: &[&str], input: &str) -> Output {
  let mut child = Command::new(env!("CARGO_BIN_EXE_steinhc"))
    .args(args)
    .stdin(Stdio::piped())
    .stdout(Stdio::piped())
    .stderr(Stdio::piped())
    .spawn()
    .unwrap();
  child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
  child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String { String::from_utf8(out.stdout.clone()).unwrap() }

fn stderr(out: &Output) -> String { String::from_utf8(out.stderr.clone()).unwrap() }

fn data_rows(text: &str) -> Vec<Vec<String>> {
  text.lines().skip(2).map(|l| l.split_whitespace().map(String::from).collect()).collect()
}

#[test]
fn cyl_hc_of_the_ball() {
  let out = steinhc(&["cyl-hc", "--cutoff", "10", "--input", &fixture("c3.json")]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  let text = stdout(&out);
  let rows: Vec<Vec<String>> = data_rows(&text).into_iter().filter(|r| r.len() == 2).collect();
  let expected: Vec<Vec<String>> = [4, 6, 8, 10].iter().map(|d| vec![d.to_string(), "1".into()]).collect();
  assert_eq!(rows, expected);
}

#[test]
fn perturbed_projective_space_fails_one_relation() {
  let out = steinhc(&["polarization-check", "--input", &fixture("cp3_perturbed.json")]);
  assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
  let text = stdout(&out);
  let fails: Vec<&str> = text.lines().filter(|l| l.trim_end().ends_with("FAIL") && !l.starts_with("overall")).collect();
  assert_eq!(fails.len(), 1, "{text}");
  assert!(fails[0].contains("b_2"));
}

#[test]
fn unperturbed_projective_space_passes() {
  let out = steinhc(&["polarization-check", "--input", &fixture("cp3.json")]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn reeb_verify_index_rows() {
  let out = steinhc(&["reeb-verify", "--m-max", "5", "--input", &fixture("handle_1_100.json")]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  let rows = data_rows(&stdout(&out));
  assert_eq!(rows.len(), 5);
  for (m, row) in (1..=5).zip(&rows) {
    assert_eq!(row, &vec![m.to_string(), (2 * m + 2).to_string(), (2 * m + 2).to_string(), "PASS".to_string()]);
  }
}

#[test]
fn reeb_verify_condition_violation_is_invalid_input() {
  let out = steinhc(&["reeb-verify", "--m-max", "200", "--input", &fixture("handle_1_100.json")]);
  assert_eq!(out.status.code(), Some(2));
  assert!(stderr(&out).contains("multiplicity 100"), "{}", stderr(&out));
  assert!(stderr(&out).contains("plane 1"), "{}", stderr(&out));
}

#[test]
fn reeb_first_returns_and_trajectory_csv() {
  let out = steinhc(&["reeb-verify", "--first-return", "--input", &fixture("handle_1_100.json")]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  assert_eq!(data_rows(&stdout(&out)).iter().filter(|r| r.last().map(String::as_str) == Some("PASS")).count(), 3);

  let out = steinhc(&[
    "reeb-verify", "--trajectory", "--time", "0.01", "--dt", "0.0001", "--format", "csv",
    "--input", &fixture("handle_1_100.json"),
  ]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  let text = stdout(&out);
  assert!(!text.contains('\r'));
  let lines: Vec<&str> = text.lines().collect();
  assert_eq!(lines[0], "t,x_1,y_1,x_2,y_2,x_3,y_3,phi");
  assert_eq!(lines.len(), 102);
  assert!(lines[1..].iter().all(|l| l.split(',').count() == 8));
}

#[test]
fn orbit_listing() {
  let out = steinhc(&["reeb-verify", "--m-max", "3", "--max-cz", "100000", "--input", &fixture("handle_1_100.json")]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  let rows = data_rows(&stdout(&out));
  // 3 planes with 3 multiplicities each
  assert_eq!(rows.len(), 9);
}

#[test]
fn cross_check_agrees_for_projective_space() {
  let out = steinhc(&["cross-check", "--cutoff", "12", "--format", "json", "--input", &fixture("cp3.json")]);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
  assert_eq!(v["agree"], json!(true));
  let keys: Vec<&String> = v["stein"].as_object().unwrap().keys().collect();
  assert_eq!(keys, ["4", "6", "8", "10", "12"]);
}

#[test]
fn cross_check_reports_disagreement() {
  let input = r#"{"kind":"polarization","payload":{"n":3,"a":[1],"b":[1,0,1,0,1],"k":1,"c":2}}"#;
  let out = steinhc_stdin(&["cross-check", "--cutoff", "8", "--input", "-"], input);
  assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
  assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn other_commands_run() {
  let c3 = fixture("c3.json");
  for args in [
    vec!["cz-index", "--m-max", "3"],
    vec!["cz-index", "--m-max", "1", "--mu-plus", "4,6", "--mu-minus", "4", "--marked", "2"],
    vec!["full-hc", "--cutoff", "12"],
    vec!["pairing", "--generator", "min", "--multiplicity", "2", "--cochain", "min=3/2"],
    vec!["pairing", "--matrix-degree", "6"],
    vec!["pairing", "--marked", "2", "--cup", "1", "--simple-minimum", "--deg1", "2", "--deg2", "2"],
  ] {
    let mut full = args.clone();
    full.extend(["--input", &c3]);
    let out = steinhc(&full);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
  }
  let prequant = r#"{"kind":"prequant","payload":{"sigma_real_dim":4,"betti":[1,0,1,0,1],"c":3,"k":1}}"#;
  let out = steinhc_stdin(&["prequant-hc", "--cutoff", "8", "--format", "csv", "--input", "-"], prequant);
  assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
  assert_eq!(stdout(&out), "degree,rank\n4,1\n6,1\n8,1\n");
}

#[test]
fn full_hc_json_is_an_array() {
  let out = steinhc(&["full-hc", "--cutoff", "8", "--format", "json", "--input", &fixture("c3.json")]);
  let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
  assert_eq!(v["coefficients"], json!([1, 0, 0, 0, 1, 0, 1, 0, 2]));
}

#[test]
fn unknown_command_prints_usage() {
  let out = steinhc(&["no-such-command"]);
  assert_eq!(out.status.code(), Some(2));
  assert!(stderr(&out).contains("Usage"));
}

#[test]
fn schema_violation_reports_path() {
  let input = r#"{"kind":"stein","payload":{"n":3,"morse":{"real_dimension":4,
    "points":[{"id":"p","index":0},{"id":"q","index":1}],
    "differential":[{"from":"q","to":"p","coefficient":1.5}]}}}"#;
  let out = steinhc_stdin(&["cyl-hc", "--cutoff", "4", "--input", "-"], input);
  assert_eq!(out.status.code(), Some(2));
  assert!(stderr(&out).contains("payload.morse.differential[0].coefficient"), "{}", stderr(&out));
  assert!(stdout(&out).is_empty());
}

#[test]
fn wrong_kind_and_missing_flags_are_invalid() {
  let out = steinhc(&["cyl-hc", "--cutoff", "4", "--input", &fixture("cp3.json")]);
  assert_eq!(out.status.code(), Some(2));
  let out = steinhc(&["cyl-hc", "--input", &fixture("c3.json")]);
  assert_eq!(out.status.code(), Some(2));
  let out = steinhc(&["cyl-hc", "--cutoff", "4"]);
  assert_eq!(out.status.code(), Some(2));
  let out = steinhc(&["cyl-hc", "--cutoff", "4", "--input", "/nonexistent/file.json"]);
  assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
  let cases = [
    vec!["cyl-hc", "--cutoff", "20", "--format", "json"],
    vec!["cz-index", "--m-max", "4", "--format", "csv"],
  ];
  let c3 = fixture("c3.json");
  for args in cases {
    let mut full = args.clone();
    full.extend(["--input", &c3]);
    let first = steinhc(&full);
    let second = steinhc(&full);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
  }
  let args = ["reeb-verify", "--first-return", "--format", "json", "--input", &fixture("handle_1_100.json")];
  assert_eq!(steinhc(&args).stdout, steinhc(&args).stdout);
}

#[test]
fn fixtures_match_published_schemas() {
  let file_schema = schema("manifold_file.schema.json");
  for (name, kind_schema) in [
    ("c3.json", "stein.schema.json"),
    ("cp3.json", "polarization.schema.json"),
    ("cp3_perturbed.json", "polarization.schema.json"),
    ("handle_1_100.json", "handle.schema.json"),
  ] {
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
    let top = json!({ "type": file_schema["type"], "required": file_schema["required"],
      "properties": file_schema["properties"], "additionalProperties": false });
    assert!(jsonschema::is_valid(&top, &doc), "{name}");
    assert!(jsonschema::is_valid(&schema(kind_schema), &doc["payload"]), "{name}");
  }
}

#[test]
fn schema_rejections_are_cli_rejections() {
  let stein = schema("stein.schema.json");
  let handle = schema("handle.schema.json");
  let prequant = schema("prequant.schema.json");
  let polarization = schema("polarization.schema.json");
  let cases = [
    ("stein", &stein, json!({"n": 3, "morse": {"real_dimension": 4, "points": [{"id": "p", "index": 0}]}, "extra": 1})),
    ("stein", &stein, json!({"n": 2, "morse": {"real_dimension": 2, "points": [{"id": "p", "index": 0}]}})),
    ("stein", &stein, json!({"n": 3, "morse": {"real_dimension": 4, "points": [{"id": "p", "index": 0}],
      "differential": [{"from": "p", "to": "p", "coefficient": "x"}]}})),
    ("handle", &handle, json!({"n": 3, "k": 0, "b": [], "b_prime": [], "a": [1.0, 2.0, -3.0], "c": 1.0})),
    ("handle", &handle, json!({"n": 3, "k": 0, "b": [], "b_prime": [], "a": [1.0, 2.0, 3.0]})),
    ("prequant", &prequant, json!({"sigma_real_dim": 4, "betti": [1, 0, 1, 0, 1], "c": 3, "k": 0})),
    ("polarization", &polarization, json!({"n": 3, "a": [], "k": 1})),
    ("polarization", &polarization, json!({"n": 3, "a": [1], "k": 1, "d": 0})),
  ];
  for (kind, schema, payload) in cases {
    assert!(!jsonschema::is_valid(schema, &payload), "{payload}");
    let doc = json!({ "kind": kind, "payload": payload }).to_string();
    let command = match kind {
      "stein" => vec!["cyl-hc", "--cutoff", "4"],
      "handle" => vec!["reeb-verify", "--m-max", "1"],
      "prequant" => vec!["prequant-hc", "--cutoff", "4"],
      _ => vec!["polarization-check"],
    };
    let mut args = command;
    args.extend(["--input", "-"]);
    let out = steinhc_stdin(&args, &doc);
    assert_eq!(out.status.code(), Some(2), "{doc}: {}", stdout(&out));
    assert!(stderr(&out).contains("payload"), "{}", stderr(&out));
  }
}

#[test]
fn help_exits_zero() {
  let out = steinhc(&["--help"]);
  assert_eq!(out.status.code(), Some(0));
  for cmd in ["cz-index", "cyl-hc", "full-hc", "pairing", "reeb-verify", "prequant-hc", "polarization-check", "cross-check"] {
    assert!(stdout(&out).contains(cmd), "{cmd}");
  }
}
