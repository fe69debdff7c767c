use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ccgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccgraph")).args(args).env_remove("CCGRAPH_CACHE").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn graph_dot_lists_sixteen_vertices() {
    let out = ccgraph(&["graph", "--ring", "M(2,GF(2))", "--format", "dot"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 16);
    assert!(text.contains("9 [label=\"[[1,0],[0,1]]\"];"));
    for line in text.lines().filter(|l| l.contains(" -- ")) {
        let (u, v) = line.trim().trim_end_matches(';').split_once(" -- ").unwrap();
        assert!(u.parse::<u32>().unwrap() < v.parse::<u32>().unwrap());
    }
}

#[test]
fn commutative_ring_has_no_edges() {
    let out = ccgraph(&["graph", "--ring", "Z(12)", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, b"u,v\n");
}

#[test]
fn exit_codes() {
    assert_eq!(ccgraph(&["graph", "--ring", "GF(6)"]).status.code(), Some(2));
    assert_eq!(ccgraph(&["graph", "--ring", "M(2,GF(2)"]).status.code(), Some(2));
    assert_eq!(ccgraph(&["graph", "--ring", "M(4,GF(3))"]).status.code(), Some(3));
    assert_eq!(ccgraph(&["closure", "--ring", "Z(12)", "--element", "12"]).status.code(), Some(2));
    assert_eq!(ccgraph(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(ccgraph(&["jordan", "--ring", "Z(12)", "--element", "3"]).status.code(), Some(2));
    assert_eq!(ccgraph(&["graph", "--ring", "Z(5)", "--out", "/nonexistent/dir/g.dot"]).status.code(), Some(4));
}

#[test]
fn closure_of_zero_in_m3f2() {
    let v = json_of(&ccgraph(&["closure", "--ring", "M(3,GF(2))", "--element", "0"]));
    assert_eq!(v["size"], 64);
    assert_eq!(v["max_level"], 2);
    assert_eq!(v["members"].as_array().unwrap().len(), 64);
}

#[test]
fn singleton_closures() {
    let v = json_of(&ccgraph(&["closure", "--ring", "Z(12)", "--element", "5"]));
    assert_eq!(v["size"], 1);
    let v = json_of(&ccgraph(&["closure", "--ring", "M(2,GF(2))", "--element", "9", "--decode"]));
    assert_eq!(v["members"][0]["id"], 9);
    assert_eq!(v["members"][0]["decoded"], "[[1,0],[0,1]]");
    let by_literal = json_of(&ccgraph(&["closure", "--ring", "M(2,GF(2))", "--element", "[[1,0],[0,1]]"]));
    assert_eq!(by_literal["element"], 9);
}

#[test]
fn analyze_quantities() {
    let v = json_of(&ccgraph(&["analyze", "--ring", "M(3,GF(2))", "--diameter"]));
    assert_eq!(v["diameter"], 2);
    assert!(v.get("girth").is_none());
    let v = json_of(&ccgraph(&["analyze", "--ring", "M(2,GF(2))", "--girth", "--distance", "9", "0"]));
    assert_eq!(v["girth"], 3);
    assert_eq!(v["distance"], Value::Null);
    let v = json_of(&ccgraph(&["analyze", "--ring", "M(3,GF(2))", "--class-diameter", "0"]));
    assert_eq!(v["class_diameter"], 2);
}

#[test]
fn jordan_of_a_full_block() {
    let v = json_of(&ccgraph(&["jordan", "--ring", "M(3,GF(2))", "--element", "[[0,1,0],[0,0,1],[0,0,0]]"]));
    assert_eq!(v["jordan_partition"], serde_json::json!([3]));
    assert_eq!(v["char_poly"], "x^3");
    assert_eq!(v["nilpotency_index"], 3);
    assert_eq!(v["fitting"]["invertible_size"], 0);
    let v = json_of(&ccgraph(&["jordan", "--ring", "M(2,GF(2))", "--element", "9"]));
    assert_eq!(v["fitting"]["invertible_size"], 2);
    assert_eq!(v["nilpotency_index"], Value::Null);
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ccgraph(&["verify", "--suite", "identities", "--ring", "Z(6)", "--json", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["suite"], "identities");
    assert_eq!(report["summary"]["failed"], 0);
    assert!(report["results"].as_array().unwrap().iter().all(|r| r["status"] != "fail"));
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["dot", "json", "csv", "edgelist"] {
        let mut outputs = Vec::new();
        for threads in ["1", "3"] {
            let path = dir.path().join(format!("{format}-{threads}"));
            let out = ccgraph(&[
                "graph",
                "--ring",
                "Z(4)xM(2,GF(2))",
                "--format",
                format,
                "--threads",
                threads,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert!(out.status.success());
            outputs.push(read(&path));
        }
        assert_eq!(outputs[0], outputs[1], "{format}");
    }
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("report-{threads}"));
        let out = ccgraph(&[
            "verify",
            "--suite",
            "properties",
            "--ring",
            "M(2,GF(2))",
            "--threads",
            threads,
            "--json",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        reports.push(read(&path));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn cache_directory_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        ccgraph(&["graph", "--ring", "M(2,GF(2))", "--format", "csv", "--cache-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let cached =
        ccgraph(&["graph", "--ring", "M(2,GF(2))", "--format", "csv", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(cached.stdout, out.stdout);

    let env_dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ccgraph"))
        .args(["graph", "--ring", "Z(6)", "--format", "edgelist"])
        .env("CCGRAPH_CACHE", env_dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 1);
}

#[test]
fn corrupt_cache_entry_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["graph", "--ring", "M(2,GF(2))", "--format", "edgelist", "--cache-dir", dir.path().to_str().unwrap()];
    let fresh = ccgraph(&args);
    let entry = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    std::fs::write(&entry, "ccgraph v1 M(2,GF(2)) 16 999\n0 1\n").unwrap();
    let rebuilt = ccgraph(&args);
    assert!(rebuilt.status.success());
    assert_eq!(rebuilt.stdout, fresh.stdout);
}

#[test]
fn failed_write_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = ccgraph(&["graph", "--ring", "GF(6)", "--out", dir.path().join("g.dot").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
