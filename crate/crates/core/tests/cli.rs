use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_yamabe-crit"));
    c.env_remove("YAMABE_CRIT_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Header row and data rows of a CSV document, skipping the `#` block.
fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let mut rows = vec![r.headers().unwrap().clone()];
    rows.extend(r.records().map(|x| x.unwrap()));
    rows
}

#[test]
fn criterion_table_contains_reference_value() {
    let o = run(&["criterion", "--n", "3..8", "--m", "2..12"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(&rows[0], vec!["n", "m", "mu", "mu_hat", "a_nm", "positive"]);
    assert_eq!(rows.len() - 1, 6 * 11);
    let a56: f64 = rows.iter().find(|r| &r[0] == "5" && &r[1] == "6").unwrap()[4].parse().unwrap();
    assert!((a56 - 1.09907).abs() < 1e-4);
}

#[test]
fn criterion_single_pairs() {
    let v = json(&run(&["criterion", "--n", "4", "--m", "7", "--format", "json"]));
    assert_eq!(v["rows"][0]["positive"], Value::Bool(true));

    let v = json(&run(&["criterion", "--n", "3", "--m", "1", "--format", "json"]));
    let row = &v["rows"][0];
    assert_eq!(row["mu"].as_f64(), Some(0.0));
    assert_eq!(row["positive"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["criterion", "--n", "2", "--m", "5"]).status.code(), Some(2));
    assert_eq!(run(&["criterion", "--n", "8..3"]).status.code(), Some(2));
    assert_eq!(run(&["criterion", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["mn-table", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["energy", "--beta-grid", "1.0"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn mn_table_matches_tabulated() {
    let v = json(&run(&["mn-table", "--n", "7", "--format", "json"]));
    let got: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["m_n"].as_u64().unwrap()).collect();
    assert_eq!(got, vec![9, 7, 6, 6, 5]);

    let v = json(&run(&["mn-table", "--n", "3", "--format", "json"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["m_n"].as_u64(), Some(9));

    let v = json(&run(&["mn-table", "--n", "30", "--format", "json"]));
    for r in v["rows"].as_array().unwrap() {
        if r["n"].as_u64().unwrap() >= 7 {
            assert_eq!(r["m_n"].as_u64(), Some(5));
        }
        assert_eq!(r["matches"], Value::Bool(true));
    }
}

#[test]
fn energy_summary_and_csv() {
    let o = run(&["energy", "--n", "3", "--m", "9", "--beta-grid", "1.01,1.02", "--resolution", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("certified: true"), "{err}");
    let text = stdout(&o);
    assert!(text.contains("# summary.0.certified=true"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows[0].iter().any(|h| h == "nehari_mass"));

    let o = run(&["energy", "--n", "3", "--m", "2", "--resolution", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["summary"][0]["certified"], Value::Bool(false));
    assert_eq!(v["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn every_document_records_seed_and_resolution() {
    let v = json(&run(&["criterion", "--n", "4", "--m", "7", "--format", "json", "--seed", "99"]));
    assert_eq!(v["seed"].as_u64(), Some(99));
    assert_eq!(v["resolution"].as_u64(), Some(12));
    assert!(v["version"].is_string());
    assert_eq!(v["config"]["seed"], Value::String("99".into()));
}

#[test]
fn figure1_writes_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = fs::read_to_string(dir.path().join("figure1.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("version=\"1.1\""));
    assert_eq!(svg.matches("<polyline").count(), 3);

    let rows = csv_rows(&fs::read_to_string(dir.path().join("figure1.csv")).unwrap());
    assert_eq!(&rows[0], vec!["x", "f3", "f4", "f5"]);
    assert_eq!(rows.len() - 1, 500);
    let first: Vec<f64> = rows[1].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0; 4]);
    for r in &rows[2..] {
        let x: f64 = r[0].parse().unwrap();
        let f5: f64 = r[3].parse().unwrap();
        if x <= 0.2 {
            assert!(f5 >= 0.0, "f5({x}) = {f5}");
        }
    }
}

#[test]
fn unwritable_output_exits_4() {
    let o = run(&["criterion", "--n", "4", "--m", "7", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["figure1", "--out", "/nonexistent-dir"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "# fixture\nn = 4\nm = 7\nformat = json\n").unwrap();

    let v = json(&run(&["criterion", "--config", path.to_str().unwrap()]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["m"].as_u64(), Some(7));

    let v = json(&run(&["criterion", "--config", path.to_str().unwrap(), "--m", "5"]));
    assert_eq!(v["rows"][0]["m"].as_u64(), Some(5));

    let o = bin().args(["criterion"]).env("YAMABE_CRIT_CONFIG", &path).output().unwrap();
    assert_eq!(json(&o)["rows"][0]["n"].as_u64(), Some(4));

    let o = run(&["criterion", "--config", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(run(&["criterion", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_output_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let a = run(&["criterion", "--n", "5", "--m", "6"]);
    let b = run(&["criterion", "--n", "5", "--m", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(b.status.code(), Some(0));
    assert!(b.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
}
