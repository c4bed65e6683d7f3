//! File loading, synthetic graph generators and the benchmark harness behind
//! the `colgraph` binary.

pub mod bench;
pub mod generate;
pub mod loader;

pub use bench::{run, BenchError, BenchmarkReport, BenchmarkSpec, CellRecord, RunOptions};
pub use generate::{generate, GenerateError, GraphKind};
pub use loader::{load, load_str, write_edges, LoadError};
