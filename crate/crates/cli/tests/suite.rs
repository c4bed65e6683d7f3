use std::path::Path;

use colgraph_cli::bench::{BenchmarkSpec, RunOptions, ORACLE_CHECK_LIMIT};

/// Every shipped spec runs with the oracle cross-check enabled; a mismatch
/// surfaces as an error carrying a reproduction command.
#[test]
fn default_suite_has_no_oracle_mismatches() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let mut specs: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    specs.sort();
    assert!(specs.len() >= 5);
    for path in specs {
        let spec = BenchmarkSpec::from_path(&path).unwrap();
        let options = RunOptions {
            parallel_cells: true,
            ..RunOptions::default()
        };
        let report = colgraph_cli::run(&spec, options).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(report.graph.vertex_count <= ORACLE_CHECK_LIMIT, "{}", path.display());
        assert!(report.oracle_checked, "{}", path.display());
        assert!(!report.cells.is_empty());
    }
}
