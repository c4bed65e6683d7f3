use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn colgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colgraph"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data/fixture.tsv")
        .to_string_lossy()
        .into_owned()
}

#[test]
fn load_prints_summary() {
    assert_eq!(stdout(&colgraph(&["load", "--edges", &fixture()])).trim(), "|V|=6 |E|=6");
}

#[test]
fn load_reports_the_bad_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tsv");
    fs::write(&path, "A\tB\ta\nB\tC\ta\nC\tD\n").unwrap();
    let out = colgraph(&["load", "--edges", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn query_every_operator() {
    for op in ["auto", "ls", "fi", "oracle"] {
        let out = colgraph(&[
            "query", "--edges", &fixture(), "--start", "A", "--predicate", "type=a", "--collect", "2", "--recurse", "2",
            "--operator", op, "--xi", "2",
        ]);
        assert_eq!(stdout(&out), "F\n", "{op}");
    }
    let out = colgraph(&[
        "query", "--edges", &fixture(), "--start", "E", "--predicate", "type=b", "--collect", "2", "--recurse", "2",
        "--direction", "bwd", "--json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["vertices"], serde_json::json!(["D"]));
    assert_eq!(json["report"]["result_size"], 1);
}

#[test]
fn generate_cluster_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("grid.tsv");
    let sorted = dir.path().join("sorted.tsv");
    let out = colgraph(&["generate", "grid:10:10", "--seed", "3", "--out", raw.to_str().unwrap()]);
    stdout(&out);
    assert_eq!(fs::read_to_string(&raw).unwrap().lines().count(), 360);
    stdout(&colgraph(&["cluster", "--edges", raw.to_str().unwrap(), "--by", "edge", "--out", sorted.to_str().unwrap()]));
    let text = fs::read_to_string(&sorted).unwrap();
    let sources: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert!(sources.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(stdout(&colgraph(&["load", "--edges", sorted.to_str().unwrap()])).trim(), "|V|=100 |E|=360");
}

#[test]
fn bench_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{
            "name": "path",
            "graph": {"source": "generator", "generator": {"kind": "path", "n": 1000}, "seed": 1},
            "query": {"starts": 1},
            "repetitions": 3,
            "seed": 2,
            "sweep": {"recurse": [1, 2, 3], "xi": [128], "operators": ["ls", "fi"]}
        }"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let out = colgraph(&[
        "bench", "--spec", spec.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(),
    ]);
    stdout(&out);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 7);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["cells"].as_array().unwrap().len(), 6);
    assert_eq!(report["oracle_checked"], true);
}

#[test]
fn bench_with_file_source_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture(), dir.path().join("g.tsv")).unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{
            "name": "fixture",
            "graph": {"source": "file", "edges": "g.tsv"},
            "query": {"starts": ["A"], "predicates": ["type=a", "*"], "collect": 0},
            "repetitions": 1,
            "sweep": {"recurse": [1, 2, "inf"], "xi": [2], "operators": ["ls", "fi", "oracle"]}
        }"#,
    )
    .unwrap();
    let out = colgraph(&["bench", "--spec", spec.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["cells"].as_array().unwrap().len(), 18);
}

#[test]
fn tgi_report_shrinks_with_fragment_size() {
    let out = colgraph(&["tgi-report", "--generate", "grid:30:30", "--cluster", "edge", "--xi", "8", "64", "512"]);
    let reports: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let bytes: Vec<u64> = reports.as_array().unwrap().iter().map(|r| r["total_bytes"].as_u64().unwrap()).collect();
    assert_eq!(bytes.len(), 3);
    assert!(bytes.windows(2).all(|w| w[1] < w[0]), "{bytes:?}");
}

#[test]
fn unknown_start_vertex_is_an_error() {
    let out = colgraph(&["query", "--edges", &fixture(), "--start", "Z"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown start vertex"));
}
