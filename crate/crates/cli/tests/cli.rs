use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guinand"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn lemma1_passes() {
    let out = run(&["verify", "lemma1", "--s", "2,3,2.5+0.7i"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
    assert!(r["timing"].as_f64().unwrap() >= 0.0);
}

#[test]
fn ppe_default_grid_passes() {
    let out = run(&["verify", "ppe"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["pass"], true);
}

#[test]
fn swapped_boundary_fails_the_balance() {
    let out = run(&["verify", "ppe", "--x", "2", "--boundary", "swapped"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matrix_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("T.csv");
    let out = run(&["matrix", "build", "--n", "32", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(&path).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(header.len(), 33);
    assert_eq!(&header[0], "m\\n");
    assert_eq!(&header[32], "32");
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 32);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), k + 1);
        for cell in row.iter().skip(1) {
            let mantissa = cell.split('e').next().unwrap();
            let digits = mantissa.chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17, "{cell}");
            assert!(cell.parse::<f64>().unwrap() > 0.0);
        }
    }
}

#[test]
fn csv_rejected_for_reports() {
    let out = run(&["--format", "csv", "verify", "lemma1", "--s", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

fn write_report(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let mut full = vec!["--out", path.to_str().unwrap()];
    full.extend_from_slice(args);
    assert_eq!(run(&full).status.code(), Some(0));
    path.to_str().unwrap().to_string()
}

#[test]
fn merge_disjoint_conflicting_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_report(dir.path(), "a.json", &["verify", "lemma1", "--s", "2"]);
    let b = write_report(dir.path(), "b.json", &["verify", "lemma1", "--s", "3"]);

    let out = run(&["report", "merge", &a, &b]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["checks"].as_array().unwrap().len(), 2);
    assert!(r["warnings"].as_array().unwrap().is_empty());

    let out = run(&["report", "merge", &a, &a]);
    let r = report(&out);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 2);
    assert!(names[1].ends_with("#2"));
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);

    let out = run(&["report", "merge"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().is_empty());
    assert_eq!(r["pass"], true);
}

#[test]
fn merge_rejects_malformed_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"checks\": 3}").unwrap();
    assert_eq!(run(&["report", "merge", bad.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["report", "merge", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn deterministic_apart_from_timing() {
    let args = ["verify", "ghat-grid", "--t-grid", "0:10:2.5"];
    let a = without_timing(report(&run(&args)));
    let b = without_timing(report(&run(&args)));
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["matrix", "residual", "--n", "8"];
    let one = Command::new(env!("CARGO_BIN_EXE_guinand"))
        .args(args)
        .env("GUINAND_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_guinand"))
        .args(args)
        .env("GUINAND_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(without_timing(report(&one)), without_timing(report(&many)));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "lemma1", "--s", "2+x"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "ppe", "--x", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["--j-max", "3", "verify", "modular"]).status.code(), Some(1));
    assert_eq!(run(&["matrix", "build", "--n", "100000"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_one() {
    let out = run(&["--out", "/nonexistent-dir/r.json", "verify", "lemma1", "--s", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn structure_reports_the_failing_inequality() {
    let out = run(&["verify", "structure", "--n", "4,8"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["gated"] == true && c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|n| n.starts_with("block_exceeds_scaled_diagonal")));
}

#[test]
fn psi0_and_solve_run() {
    let out = run(&["psi0", "compare", "--n", "5", "--zeros", "20"]);
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    let out = run(&["matrix", "solve", "--n", "8", "--synthetic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
