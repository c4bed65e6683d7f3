//! Shared workloads for the criterion benchmarks.

use colgraph::{Depth, Direction, PropertyGraph, TraversalConfig};
use colgraph_cli::{generate, GraphKind};

/// 100×100 lattice, edge clustered.
pub fn grid() -> PropertyGraph {
    generate(&GraphKind::Grid { width: 100, height: 100 }, 1, false)
        .expect("valid generator")
        .edge_clustered()
        .expect("generated graphs cluster")
}

/// Power law with exponent 2.2, zipf weights, edge clustered.
pub fn powerlaw(avg_degree: f64, n: usize) -> PropertyGraph {
    let kind = GraphKind::PowerLaw {
        alpha: 2.2,
        avg_degree,
        n,
    };
    generate(&kind, 1, true)
        .expect("valid generator")
        .edge_clustered()
        .expect("generated graphs cluster")
}

/// `({start}, φ, r, r, →)`.
pub fn query(start: &str, predicate: &str, r: u32) -> TraversalConfig {
    TraversalConfig::new(
        [start],
        predicate.parse().expect("valid predicate"),
        r,
        Depth::Finite(r),
        Direction::Forward,
    )
}
