//! End-to-end tests of the `cac` binary: output shapes, determinism,
//! exit codes, and the construct/verify round trip.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_73() {
    let v = stdout_json(&cac(&["analyze", "73", "--json"]));
    assert_eq!(v["ell"], 4);
    assert_eq!(v["O_p"], 4);
    assert_eq!(v["m_e"], 16);
    assert_eq!(v["upper_bound"], 17);
    assert_eq!(v["known_optimal"], 17);
    assert_eq!(v["o_p_2"], 9);
    assert_eq!(v["primitive_root"], 5);
}

#[test]
fn analyze_331() {
    let v = stdout_json(&cac(&["analyze", "331", "--json"]));
    assert_eq!(v["ell"], 11);
    assert_eq!(v["L_order"], 30);
}

#[test]
fn analyze_rejects_composites() {
    let out = cac(&["analyze", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));
}

#[test]
fn usage_errors_exit_1() {
    let out = cac(&["analyze"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cac(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn matrix_31_matches_worked_example() {
    let v = stdout_json(&cac(&["matrix", "31", "--json"]));
    assert_eq!(v["g"], 3);
    assert_eq!(v["rows"], serde_json::json!([[3, 4, 2], [4, 2, 4], [2, 4, 4]]));

    // Another root permutes the table but keeps the corner entry.
    let v = stdout_json(&cac(&["matrix", "31", "--root", "11", "--json"]));
    assert_eq!(v["rows"][0][0], 3);
}

#[test]
fn squares_31() {
    let v = stdout_json(&cac(&["squares", "31", "2", "--json"]));
    assert_eq!(v["count"], 3);
    assert_eq!(v["members"], serde_json::json!([10, 14, 19]));
}

#[test]
fn construct_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p73.json");
    let summary = stdout_json(&cac(&[
        "construct",
        "73",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(summary["size"], 17);
    assert_eq!(summary["optimal"], true);

    let v = stdout_json(&cac(&["verify", path.to_str().unwrap(), "--json"]));
    assert_eq!(v["verified"], true);
    assert_eq!(v["size"], 17);
}

#[test]
fn construct_output_is_byte_identical() {
    let a = cac(&["construct", "131", "--json"]);
    let b = cac(&["construct", "131", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // And within the document, codewords are sorted.
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let words = v["codewords"].as_array().unwrap();
    let mut sorted = words.clone();
    sorted.sort_by_key(|w| w.to_string());
    let mut lex: Vec<Vec<u64>> = words
        .iter()
        .map(|w| w.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect())
        .collect();
    let unsorted = lex.clone();
    lex.sort();
    assert_eq!(lex, unsorted);
}

#[test]
fn verify_conflict_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"codewords":[[0,1,2],[0,2,4]],"format":"cac-v1","p":13,"weight":3}"#,
    )
    .unwrap();
    let out = cac(&["verify", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verified"], false);
    assert_eq!(v["conflict"]["difference"], 2);
}

#[test]
fn verify_unreadable_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "not json at all").unwrap();
    assert_eq!(cac(&["verify", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(
        cac(&["verify", dir.path().join("missing.json").to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn oracle_31() {
    let v = stdout_json(&cac(&["oracle", "31", "--json"]));
    assert_eq!(v["max"], 7);
    assert_eq!(v["witness"].as_array().unwrap().len(), 7);
}

#[test]
fn simulate_three_users_always_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p73.json");
    assert!(cac(&["construct", "73", "--out", path.to_str().unwrap()])
        .status
        .success());
    let v = stdout_json(&cac(&[
        "simulate",
        path.to_str().unwrap(),
        "--active",
        "3",
        "--trials",
        "500",
        "--seed",
        "7",
        "--json",
    ]));
    assert_eq!(v["success_rate"], 1.0);
    assert_eq!(v["successes"], 500);
    assert_eq!(v["seed"], 7);
}

#[test]
fn scan_small_range_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.jsonl");
    let v = stdout_json(&cac(&[
        "scan",
        "--range",
        "5..60",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(v["failed"], 0);
    assert_eq!(v["scanned"], 15);
    assert_eq!(count_lines(&path), 15);

    // Resuming over a wider range only scans the new primes.
    let v = stdout_json(&cac(&[
        "scan",
        "--range",
        "5..80",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(v["scanned"], 5);
    assert_eq!(v["skipped_existing"], 15);
    assert_eq!(count_lines(&path), 20);

    // Records are valid JSON, ordered by p, all verified.
    let text = std::fs::read_to_string(&path).unwrap();
    let mut last = 0;
    for line in text.lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        let p = r["p"].as_u64().unwrap();
        assert!(p > last);
        last = p;
        assert_eq!(r["verified"], true);
    }
}

#[test]
fn scan_full_acceptance_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("full.jsonl");
    let v = stdout_json(&cac(&[
        "scan",
        "--range",
        "5..500",
        "--checks",
        "all",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(v["failed"], 0);
    assert_eq!(v["scanned"], 93);

    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["verified"], true, "record {r}");
        let ell = r["ell"].as_u64().unwrap();
        // Positivity of s(ell) in every settled regime.
        if matches!(ell, 3 | 4 | 5) || (ell >= 3 && ell % 2 == 1 && is_prime(ell)) {
            assert!(r["s_ell"].as_u64().unwrap() > 0, "record {r}");
        }
    }
}

#[test]
fn scan_rejects_bad_inputs() {
    assert_eq!(cac(&["scan", "--range", "nope"]).status.code(), Some(1));
    assert_eq!(
        cac(&["scan", "--range", "50..5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        cac(&["scan", "--range", "5..50", "--checks", "bogus"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn scan_subset_of_checks() {
    // Without --out, records stream to stdout followed by the summary.
    let out = cac(&["scan", "--range", "5..40", "--checks", "group,oracle", "--json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let records: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 10 + 1); // primes in 5..=40, then the summary
    let summary = records.last().unwrap();
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["scanned"], 10);
}

fn count_lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}
