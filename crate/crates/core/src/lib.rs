//! In-memory columnar property-graph storage with two traversal operators.
//!
//! Graphs live in a vertex and an edge column group, dictionary encoded with
//! one vertex dictionary shared by the source and target columns. Queries are
//! `(S, φ, c, r, d)` configurations: start vertices, an edge predicate, the
//! first and last level to traverse and collect, and a direction. They run on
//! either a level-synchronous full-column scan ([`ls`]) or a
//! fragment-at-a-time traversal steered by a transition index ([`fi`]),
//! chosen by a cost model ([`engine`]).
//!
//! ```
//! use colgraph::{build_graph_from_edges, parse, Direction, EdgeRecord, TraversalConfig, Traverser};
//!
//! let g = build_graph_from_edges(&[
//!     EdgeRecord::typed("A", "B", "a"),
//!     EdgeRecord::typed("B", "C", "a"),
//!     EdgeRecord::typed("B", "D", "b"),
//! ])
//! .unwrap();
//! let cfg = TraversalConfig::new(["A"], parse("type=a").unwrap(), 2, 2.into(), Direction::Forward);
//! let out = Traverser::new(&g).traverse(&cfg, None).unwrap();
//! assert_eq!(out.vertices.into_iter().collect::<Vec<_>>(), ["C"]);
//! ```

#![allow(clippy::single_range_in_vec_init)]

pub mod bitset;
pub mod engine;
pub mod fi;
pub mod ls;
pub mod predicate;
pub mod storage;

pub use bitset::Bitset;
pub use engine::{
    choose_operator, cost_fi, cost_ls, decode, generate_result, oracle_traverse, prepare, traverse, CostParams, Depth,
    EngineError, ExecutionReport, LevelMap, Operator, PhaseTimes, PreparedConfig, TraversalConfig, TraversalCounters,
    TraversalOutcome, Traverser,
};
pub use fi::{fi_traverse, BloomFilter, FragmentPolicy, IndexError, TgiReport, TransitionGraphIndex};
pub use ls::{ls_traverse, ScanPartitioning};
pub use predicate::{evaluate, parse, ActiveEdgeList, Predicate, PredicateError};
pub use storage::{
    build_graph, build_graph_from_edges, build_graph_indexed, cluster_by_edge, cluster_by_type, compute_stats, Column,
    Dictionary, Direction, EdgeColumnGroup, EdgeLayout, EdgeRecord, GraphStats, PropertyGraph, StorageError,
    VertexCode, VertexColumnGroup, VertexRecord, DEFAULT_STATS_SAMPLE,
};
