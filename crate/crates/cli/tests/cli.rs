use std::path::Path;
use std::process::{Command, Output};

fn addcomb(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(args)
        .env("ADDCOMB_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn count_prints_the_exact_count() {
    let tmp = tempfile::tempdir().unwrap();
    let o = addcomb(&["count", "--ambient", "int", "--N", "10", "--k", "3", "--m", "5"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "20");
    let m = manifest(tmp.path());
    assert_eq!(m["subcommand"], "count");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["schema_version"], 1);
}

#[test]
fn env_var_sets_output_dir_and_flag_overrides_it() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");
    addcomb(&["isoperimetry"], &env_dir);
    assert!(env_dir.join("manifest.json").exists());
    addcomb(&["isoperimetry", "--out-dir", flag_dir.to_str().unwrap()], &env_dir.join("unused"));
    assert!(flag_dir.join("isoperimetry.csv").exists());
    assert!(!env_dir.join("unused").exists());
}

#[test]
fn usage_errors_exit_64() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(addcomb(&["nonsense"], tmp.path()).status.code(), Some(64));
    assert_eq!(addcomb(&["count", "--ambient", "int"], tmp.path()).status.code(), Some(64));
    assert_eq!(addcomb(&["cayley", "--N", "0"], tmp.path()).status.code(), Some(64));
    assert_eq!(addcomb(&["selftest", "--threads", "0"], tmp.path()).status.code(), Some(64));
    assert_eq!(addcomb(&["--help"], tmp.path()).status.code(), Some(0));
}

#[test]
fn budget_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = addcomb(&["count", "--ambient", "int", "--N", "100", "--k", "20"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(manifest(tmp.path())["exit_code"], 3);
}

#[test]
fn failed_checks_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // {0,1,3,4} in Z/6 has r = 1 and |A+A| = 6 < 2|A| - 1.
    let o = addcomb(&["freiman", "--ambient", "cyclic", "--N", "6", "--set", "0,1,3,4"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = addcomb(&["selftest"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn cayley_table_has_one_row_per_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let o = addcomb(&["cayley", "--N", "101", "--seed", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(tmp.path().join("cayley.csv")).unwrap();
    let head: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(head, ["schema_version", "N", "seed", "stream", "A_size", "omega", "threshold", "violated"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|row| &row[0] == "1" && &row[1] == "101"));
}

#[test]
fn jsonl_records_carry_schema_version() {
    let tmp = tempfile::tempdir().unwrap();
    addcomb(&["missing", "--s-max", "6", "--samples", "5000"], tmp.path());
    let text = std::fs::read_to_string(tmp.path().join("missing.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!(v["record"].is_string());
    }
    let m = manifest(tmp.path());
    let files: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|f| f["file"].as_str().unwrap()).collect();
    assert_eq!(files, ["missing.jsonl", "missing.csv"]);
    assert_eq!(m["seed"], 0);
}
