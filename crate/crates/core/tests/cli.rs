use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hhquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhquad"))
        .args(args)
        .env_remove("HHQUAD_SINGLE_THREAD")
        .output()
        .unwrap()
}

fn corpus_path() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus/default.toml")
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn out_path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn bundled_corpus_passes() {
    let out = hhquad(&["check", &corpus_path()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let residual = headers.iter().position(|h| h == "identity_residual").unwrap();
    let status = headers.iter().position(|h| h == "hypothesis_status").unwrap();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 24);
    for row in &rows {
        assert!(row[residual].parse::<f64>().unwrap() <= 1e-9);
        assert_ne!(&row[status], "violated");
    }
    assert!(text.starts_with("# tolerance.identity=1.0000000000000001e-9\n"));
}

#[test]
fn inverted_interval_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.toml",
        "[[entry]]\nname = \"bad\"\nexpression = \"x\"\na = 1.0\nb = 0.0\nn_values = [1]\n",
    );
    let out = hhquad(&["check", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5"), "{err}");
    assert!(err.contains("field `b`"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unparsable_expression_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.toml",
        "[[entry]]\nname = \"bad\"\nexpression = \"abs(x)\"\na = 0.0\nb = 1.0\nn_values = [1]\n",
    );
    let out = hhquad(&["check", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("field `expression`"), "{err}");
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = hhquad(&["check", "/nonexistent/corpus.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sing.toml",
        "[[entry]]\nname = \"log\"\nexpression = \"ln(x)\"\na = -1.0\nb = 1.0\nn_values = [1]\n",
    );
    let out = hhquad(&["check", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn tight_identity_tolerance_fails_the_check() {
    // The residual for exp is a few ulps, never exactly zero at this size.
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "exp.toml",
        "[[entry]]\nname = \"wide\"\nexpression = \"exp(3*x)\"\na = 0.0\nb = 4.0\nn_values = [1, 2, 3, 4]\n",
    );
    let out = hhquad(&["check", &cfg, "--tolerance-identity", "1e-300"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sine_rows_are_observed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sin.toml",
        "[[entry]]\nname = \"sine\"\nexpression = \"sin(x)\"\na = 0.0\nb = 3.141592653589793\nn_values = [2]\n",
    );
    let out = hhquad(&["check", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["hypothesis_status"], "observed");
    assert_eq!(rows[0]["hh_sanity"], "not_applicable");
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let csv_out = hhquad(&["check", &corpus_path(), "--format", "csv"]);
    let json_out = hhquad(&["--format", "json", "check", &corpus_path()]);
    let csv_text = String::from_utf8(csv_out.stdout).unwrap();
    let json_text = String::from_utf8(json_out.stdout).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();

    // Compare the raw numeric text: the JSON numbers are spliced in unparsed.
    let mut compared = 0;
    for record in &records {
        for (h, v) in headers.iter().zip(record.iter()) {
            if v.contains('e') && v.parse::<f64>().is_ok() {
                let needle = format!("\"{h}\": {v}");
                assert!(json_text.contains(&needle), "missing {needle}");
                compared += 1;
            }
        }
    }
    assert!(compared > 24 * 8);
    for line in csv_text.lines().take_while(|l| l.starts_with('#')) {
        let (key, value) = line.trim_start_matches("# tolerance.").split_once('=').unwrap();
        assert!(json_text.contains(&format!("\"{key}\": {value}")), "{line}");
    }
}

#[test]
fn table_for_bundled_corpus() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "table.csv");
    let status = hhquad(&["table", &corpus_path(), "--out", &out]);
    assert_eq!(status.status.code(), Some(0));
    let text = read(&out);
    assert_eq!(text.lines().next(), Some("name,n,q,actual_error,eq3,eq4,eq7"));
    let row = text
        .lines()
        .find(|l| l.starts_with("exp,2,2.0000000000000000e0,"))
        .expect("exp n=2 q=2 row");
    let fields: Vec<f64> = row.split(',').skip(3).map(|v| v.parse().unwrap()).collect();
    let e = std::f64::consts::E;
    assert!((fields[0] - (e - 1.0 - e.sqrt())).abs() <= 1e-9 * fields[0]);
    assert!((fields[1] - (1.0 + e) / 48.0).abs() <= 1e-12 * fields[1]);
    assert!((fields[2] - 0.112_312_584_285_056).abs() <= 1e-12 * fields[2]);
    assert!((fields[3] - 0.084_944_452_284_476_7).abs() <= 1e-12 * fields[3]);
    // 6 entries x 4 orders x 5 q values.
    assert_eq!(text.lines().count(), 1 + 6 * 4 * 5);
    let q_one = text
        .lines()
        .find(|l| l.starts_with("exp,2,1.0000000000000000e0,"))
        .unwrap();
    assert_eq!(q_one.split(',').nth(5), Some(""));
}

#[test]
fn empty_corpus_gives_header_only_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "empty.toml", "");
    let out = out_path(&dir, "table.csv");
    let status = hhquad(&["table", &cfg, "--out", &out]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    assert_eq!(read(&out), "name,n,q,actual_error,eq3,eq4,eq7\n");
}

#[test]
fn kernel_dump() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "kernel.csv");
    let status = hhquad(&["kernel", "--n", "2", "--out", &out]);
    assert_eq!(status.status.code(), Some(0));
    let text = read(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1002);
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines[501], "5.0000000000000000e-1,1.2500000000000000e-1");

    let bad = hhquad(&["kernel", "--n", "13", "--out", &out]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn single_thread_env_matches_parallel_run() {
    let parallel = hhquad(&["check", &corpus_path(), "--jobs", "8"]);
    let single = Command::new(env!("CARGO_BIN_EXE_hhquad"))
        .args(["check", &corpus_path(), "--jobs", "8"])
        .env("HHQUAD_SINGLE_THREAD", "1")
        .output()
        .unwrap();
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(parallel.stdout, single.stdout);
}
