use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hololab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hololab"))
        .args(args)
        .env_remove("HOLOLAB_CACHE")
        .output()
        .expect("binary runs")
}

fn cached(dir: &Path, args: &[&str]) -> Output {
    let mut full = vec!["--cache-dir", dir.to_str().unwrap(), "-v"];
    full.extend_from_slice(args);
    hololab(&full)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let o = hololab(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).expect("valid JSON")
}

#[test]
fn exit_codes() {
    assert_eq!(hololab(&["dim", "A2", "[1,1]"]).status.code(), Some(0));
    assert_eq!(hololab(&["--help"]).status.code(), Some(0));
    // Malformed input.
    assert_eq!(hololab(&["dim", "A2", "[1,x]"]).status.code(), Some(2));
    assert_eq!(hololab(&["dim", "Z9", "[1]"]).status.code(), Some(2));
    assert_eq!(hololab(&["bbw", "A1", "x", "[1,2]"]).status.code(), Some(2));
    assert_eq!(hololab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hololab(&["torsion", "--dimM", "four", "--dimX", "1"]).status.code(), Some(2));
    // Well formed but rejected by the engine.
    let o = hololab(&["torsion", "--dimM", "3", "--dimX", "5", "--rankD", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("negative"));
    assert_eq!(hololab(&["screen", "A2", "[0,0]"]).status.code(), Some(1));
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&hololab(&["dim", "A2", "[1,1]"])), "8\n");
    assert_eq!(stdout(&hololab(&["torsion", "--dimM", "4", "--dimX", "1", "--rankD", "2"])), "0\n");
    let v = json(&["legendre", "A1", "[3]", "--kmax", "3"]);
    assert_eq!(v["torsion_obstruction"], serde_json::json!({ "exact": 0 }));
    assert_eq!(v["g_ind_dim"]["exact"], 4);
}

#[test]
fn text_and_json_agree() {
    let text = stdout(&hololab(&["legendre", "A1", "[3]", "--kmax", "3"]));
    let v = json(&["legendre", "A1", "[3]", "--kmax", "3"]);
    for key in ["g_ind_dim", "conn_space_dim", "torsion_obstruction", "curvature_space"] {
        let line = format!("{key} = {}", v[key]["exact"]);
        assert!(text.contains(&line), "missing `{line}` in\n{text}");
    }

    let text = stdout(&hololab(&["screen", "B3", "[0,0,1]"]));
    let v = json(&["screen", "B3", "[0,0,1]"]);
    let class = v["classification"].as_str().unwrap();
    assert!(text.contains(&format!("classification = {class}")));
    assert!(text.contains(&format!("dim_rep = {}", v["candidate"]["dim_rep"])));

    let text = stdout(&hololab(&["bbw", "A1", "x", "[-3]"]));
    let v = json(&["bbw", "A1", "x", "[-3]"]);
    assert!(text.contains(&format!("h^1 = {}", v["h"]["1"]["exact"])));
    assert!(text.contains(&format!("euler = {}", v["euler"])));

    let text = stdout(&hololab(&["tensor", "A2", "[1,0]", "[0,1]"]));
    let v = json(&["tensor", "A2", "[1,0]", "[0,1]"]);
    assert!(text.contains(&format!("total {}", v["total_dimension"])));
    assert_eq!(v["total_dimension"], 9);
}

#[test]
fn printed_values_parse_back() {
    let text = stdout(&hololab(&["roots", "B2"]));
    let weights: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split(" -> ").nth(1))
        .collect();
    assert_eq!(weights.len(), 4);
    for w in weights {
        let o = hololab(&["dim", "B2", w]);
        // Positive roots need not be dominant; the parser must still accept them.
        assert_ne!(o.status.code(), Some(2), "{w} did not parse back");
    }

    let text = stdout(&hololab(&["cotangent", "A3", "xoo"]));
    let marking = text.split_whitespace().next().unwrap();
    let (system, mask) = marking.split_once('/').unwrap();
    assert_eq!((system, mask), ("A3", "xoo"));
    let again = stdout(&hololab(&["cotangent", system, mask]));
    assert_eq!(text, again);
}

#[test]
fn cache_hits_and_recovers_from_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["legendre", "A1", "[3]", "--kmax", "3", "--json"];
    let first = cached(dir.path(), &args);
    assert!(first.status.success());
    assert!(stderr(&first).contains("miss"));

    let second = cached(dir.path(), &args);
    assert!(stderr(&second).contains("hit"));
    assert_eq!(stdout(&first), stdout(&second));

    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let mut raw = std::fs::read_to_string(&entries[0]).unwrap();
    raw = raw.replace("\"exact\": 0", "\"exact\": 7");
    std::fs::write(&entries[0], raw).unwrap();

    let third = cached(dir.path(), &args);
    assert!(third.status.success());
    assert!(stderr(&third).contains("corrupt"));
    assert_eq!(stdout(&first), stdout(&third));
    assert!(stderr(&cached(dir.path(), &args)).contains("hit"));
}

#[test]
fn cache_keys_separate_modes_and_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = cached(dir.path(), &["dim", "A2", "[1,1]"]);
    let as_json = cached(dir.path(), &["dim", "A2", "[1,1]", "--json"]);
    assert!(stderr(&as_json).contains("miss"));
    assert_ne!(stdout(&text), stdout(&as_json));
    let other = cached(dir.path(), &["dim", "A2", "[2,1]"]);
    assert!(stderr(&other).contains("miss"));
    assert_eq!(stdout(&other), "15\n");
    // Equivalent spellings normalize to one entry.
    let spaced = cached(dir.path(), &["dim", "A2", "[ 1, 1 ]"]);
    assert!(stderr(&spaced).contains("hit"), "{}", stderr(&spaced));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn sweep_streams_json_lines() {
    let o = hololab(&["sweep", "--max-rank", "1", "--max-level", "3", "--kmax", "2", "--jobs", "2", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|v| v["classification"].is_string()));
}
