use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use h1loc_cli::record::ScanRecord;

fn h1loc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h1loc"))
        .args(args)
        .env_remove("H1LOC_BUDGET")
        .output()
        .expect("spawn h1loc")
}

fn groups_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("groups")
}

fn group(name: &str) -> String {
    groups_dir().join(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_spec(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("spec.json");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_borel_example_has_trivial_local_cohomology() {
    let out = h1loc(&["analyze", &group("borel_z25.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["order"], 100);
    assert_eq!(doc["h1_loc"]["factors"], Value::Array(vec![]));
    assert_eq!(doc["local_vanishing"]["status"], "holds");
    assert_eq!(doc["rho_lift"]["eigenvalues"], serde_json::json!([7, 1]));
}

#[test]
fn analyze_empty_generators_is_trivial_group() {
    let out = h1loc(&["analyze", &group("trivial_f2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["order"], 1);
    assert_eq!(doc["h1"]["factors"], Value::Array(vec![]));
    assert_eq!(doc["h1_loc"]["factors"], Value::Array(vec![]));
}

#[test]
fn analyze_witness_reports_failed_hypotheses_not_falsification() {
    let out = h1loc(&["analyze", &group("witness_z4.json")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["h1_loc"]["factors"], serde_json::json!([2]));
    assert_eq!(doc["local_vanishing"]["status"], "not-applicable");
    assert!(!doc["local_vanishing"]["violated_hypotheses"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn input_errors_exit_one_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"p": 5, "n": 1, "generators": [[[1, 2], [2, 4]]]}"#,
            "generators[0]",
        ),
        (r#"{"p": 6, "n": 1, "generators": []}"#, "`p`"),
        (r#"{"p": 5, "n": 0, "generators": []}"#, "`n`"),
        (
            "{\"p\": 5,\n \"n\": 1,\n \"generators\": [[[1, 0], [0, 1]]}",
            ":3:",
        ),
        (r#"{"p": 5, "n": 1, "generators": [], "extra": 1}"#, "extra"),
    ];
    for (text, needle) in cases {
        let out = h1loc(&["analyze", &write_spec(&dir, text)]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(stderr(&out).contains(needle), "{text}: {}", stderr(&out));
        assert!(out.stdout.is_empty());
    }
    let missing = h1loc(&["analyze", "/nonexistent/spec.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(h1loc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(h1loc(&["scan", "--p", "5"]).status.code(), Some(1));
    assert_eq!(
        h1loc(&["constants", "--degree", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(h1loc(&["--help"]).status.code(), Some(0));
}

#[test]
fn large_ambient_group_rejects_exhaustive_mode() {
    let out = h1loc(&["scan", "--p", "11", "--n", "1", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--mode sample"));
}

#[test]
fn sample_scan_is_byte_identical_across_runs() {
    let args = [
        "scan", "--p", "5", "--n", "2", "--count", "40", "--seed", "11",
    ];
    let a = h1loc(&args);
    let b = h1loc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let c = h1loc(&[
        "scan", "--p", "5", "--n", "2", "--count", "40", "--seed", "12",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let a = h1loc(&["analyze", &group("borel_z25.json")]);
    let b = h1loc(&["analyze", &group("borel_z25.json")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scan_records_round_trip_and_are_hash_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("z4.ndjson");
    let sum_path = dir.path().join("summary.json");
    let out = h1loc(&[
        "scan",
        "--p",
        "2",
        "--n",
        "2",
        "--mode",
        "exhaustive",
        "--out",
        out_path.to_str().unwrap(),
        "--summary",
        sum_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut hashes = vec![];
    for line in text.lines() {
        let rec: ScanRecord = serde_json::from_str(line).unwrap();
        assert_eq!(serde_json::to_string(&rec).unwrap(), line);
        assert!(rec.wall_time_us.is_none());
        hashes.push(rec.hash);
    }
    assert_eq!(hashes.len(), 234);
    assert!(hashes.windows(2).all(|w| w[0] < w[1]));

    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(&sum_path).unwrap()).unwrap();
    assert_eq!(summary["counts"]["groups"], 234);
    assert_eq!(summary["sentinel"], "pass");
    assert!(summary["counts"]["h1_loc_nontrivial"].as_u64().unwrap() >= 1);
}

#[test]
fn zero_count_gives_empty_stream_and_summary() {
    let out = h1loc(&[
        "scan", "--p", "5", "--n", "2", "--count", "0", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["counts"]["groups"], 0);
    assert_eq!(summary["header"]["seed"], 3);
}

#[test]
fn full_determinant_filter_keeps_only_surjective_groups() {
    let out = h1loc(&[
        "scan",
        "--p",
        "3",
        "--n",
        "1",
        "--mode",
        "exhaustive",
        "--require-full-det",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = out
        .stdout
        .split(|&b| b == b'\n')
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_slice(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|r| r["full_determinant"] == true));
}

#[test]
fn timing_is_opt_in() {
    let out = h1loc(&["scan", "--p", "3", "--n", "1", "--count", "3", "--timing"]);
    let first: Value =
        serde_json::from_slice(out.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert!(first["wall_time_us"].is_u64());
}

#[test]
fn constants_degree_one_and_two() {
    let one = json(&h1loc(&["constants", "--degree", "1"]));
    assert_eq!(one["constant"], 7);
    assert_eq!(one["exceptional_primes"], serde_json::json!([2, 3, 5, 7]));
    let two = json(&h1loc(&["constants", "--degree", "2"]));
    assert_eq!(two["constant"], 13);
    assert_eq!(
        two["exceptional_primes"],
        serde_json::json!([2, 3, 5, 7, 11, 13])
    );
    let four = h1loc(&["constants", "--degree", "4"]);
    let doc = json(&four);
    assert_eq!(doc["p0_bound"], 9);
    assert_eq!(doc["merel_constant"], "unavailable");
    assert!(stderr(&four).contains("p0 bound"));
}

#[test]
fn budget_env_var_sets_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_h1loc"))
        .args(["analyze", &group("borel_z25.json")])
        .env("H1LOC_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["header"]["budget"], 10);
    assert_eq!(doc["local_vanishing"]["status"], "unchecked");
}

fn row<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == id)
        .unwrap_or_else(|| panic!("row {id}"))
}

#[test]
fn verify_passes_on_clean_build() {
    let out = h1loc(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    for r in report["rows"].as_array().unwrap() {
        assert_ne!(r["status"], "fail", "{r}");
    }
    assert!(stderr(&out).contains("commutator-closed-form"));
}

#[test]
fn corrupted_commutator_formula_fails_its_row() {
    let out = h1loc(&["verify", "--mutate", "commutator-formula"]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["passed"], false);
    assert_eq!(row(&report, "commutator-closed-form")["status"], "fail");
    assert_eq!(row(&report, "cohomology-vs-brute-force")["status"], "pass");
}

#[test]
fn zero_budget_skips_rows_as_warnings() {
    let out = h1loc(&["--budget", "0", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(row(&report, "local-vanishing")["status"], "skipped");
    assert_eq!(row(&report, "constants")["status"], "pass");
    assert!(stderr(&out).contains("warning"));
}

fn required_keys(schema: &str) -> Vec<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(schema);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    doc["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k.as_str().unwrap().to_owned())
        .collect()
}

fn assert_shape(schema: &str, doc: &Value) {
    let obj = doc.as_object().unwrap();
    let required = required_keys(schema);
    for key in &required {
        assert!(obj.contains_key(key), "{schema}: missing {key}");
    }
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(schema);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let props = s["properties"].as_object().unwrap();
    for key in obj.keys() {
        assert!(props.contains_key(key), "{schema}: undocumented {key}");
    }
}

#[test]
fn outputs_match_documented_top_level_fields() {
    for entry in std::fs::read_dir(groups_dir()).unwrap() {
        let path = entry.unwrap().path();
        let spec: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_shape("group_spec.schema.json", &spec);
        assert_shape(
            "analyze_report.schema.json",
            &json(&h1loc(&["analyze", path.to_str().unwrap()])),
        );
    }
    let scan = h1loc(&["scan", "--p", "3", "--n", "1", "--count", "5"]);
    let first: Value =
        serde_json::from_slice(scan.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_shape("scan_record.schema.json", &first);
    assert_shape(
        "scan_summary.schema.json",
        &serde_json::from_slice(&scan.stderr).unwrap(),
    );
    assert_shape(
        "constants.schema.json",
        &json(&h1loc(&["constants", "--degree", "3"])),
    );
    assert_shape(
        "verify_report.schema.json",
        &json(&h1loc(&["--budget", "0", "verify"])),
    );
}
