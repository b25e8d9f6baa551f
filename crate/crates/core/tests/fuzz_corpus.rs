//! Replays the checked-in fuzz corpus through the same properties the fuzz
//! targets assert, so they are exercised on every test run.

use std::fs;
use std::path::PathBuf;

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), fs::read(&path).unwrap())
        })
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus for {target}");
    files
}

#[test]
fn dataset_csv_seeds() {
    let mut accepted = 0;
    for (name, bytes) in corpus("dataset_csv") {
        if let Ok(d) = gdei::data::read_csv(&bytes[..], "y") {
            accepted += 1;
            assert_eq!(gdei::data::read_csv(d.to_csv().as_bytes(), "y").unwrap(), d, "{name}");
        }
    }
    assert!(accepted > 0);
}

#[test]
fn trace_csv_seeds() {
    let mut accepted = 0;
    for (name, bytes) in corpus("trace_csv") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(records) = gdei::report::parse_trace_csv(text) {
            accepted += 1;
            let csv = gdei::report::records_to_csv(&records);
            assert_eq!(csv, text, "{name}");
        }
    }
    assert!(accepted > 0);
}

#[test]
fn optimizer_spec_seeds() {
    let mut accepted = 0;
    for (name, bytes) in corpus("optimizer_spec") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(spec) = gdei::cli::parse_optimizer_spec(text) {
            accepted += 1;
            spec.optimizer.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
    assert!(accepted > 0);
}

#[test]
fn comparison_json_seeds() {
    let mut accepted = 0;
    for (name, bytes) in corpus("comparison_json") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(report) = gdei::report::parse_comparison_json(text) {
            accepted += 1;
            assert_eq!(gdei::report::comparison_to_json(&report), text, "{name}");
        }
    }
    assert!(accepted > 0);
}
