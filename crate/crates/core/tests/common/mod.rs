#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use colgraph::{build_graph_from_edges, Depth, Direction, EdgeRecord, Predicate, PropertyGraph, TraversalConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TYPES: [&str; 3] = ["a", "b", "c"];

/// Random typed multigraph over `n` vertices with about `avg_degree * n`
/// edges. Isolated vertices are dropped, as the edge list implies the vertex set.
pub fn random_graph(seed: u64, n: usize, avg_degree: f64) -> PropertyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = ((n as f64) * avg_degree).round().max(1.0) as usize;
    let edges: Vec<EdgeRecord> = (0..m)
        .map(|_| {
            let s = rng.random_range(0..n);
            let t = rng.random_range(0..n);
            let ty = TYPES[rng.random_range(0..TYPES.len())];
            EdgeRecord::typed(format!("v{s}"), format!("v{t}"), ty)
        })
        .collect();
    build_graph_from_edges(&edges).unwrap()
}

pub fn random_type_predicate(rng: &mut ChaCha8Rng) -> Predicate {
    let texts = [
        "*",
        "type=a",
        "type=b",
        "type=a or type=b",
        "not type=c",
        "type!=a and type!=b",
        "type=a and type=b",
        "type>=b",
    ];
    texts[rng.random_range(0..texts.len())].parse().unwrap()
}

pub fn random_config(rng: &mut ChaCha8Rng, g: &PropertyGraph) -> TraversalConfig {
    let ids = g.vertex_dictionary().values();
    let starts: Vec<String> = (0..rng.random_range(0..4))
        .map(|_| ids[rng.random_range(0..ids.len())].clone())
        .collect();
    let recurse = if rng.random_bool(0.15) {
        Depth::Unbounded
    } else {
        Depth::Finite(rng.random_range(0..=8))
    };
    let collect = rng.random_range(0..=recurse.limit().min(8));
    let direction = if rng.random_bool(0.5) {
        Direction::Forward
    } else {
        Direction::Backward
    };
    TraversalConfig::new(starts, random_type_predicate(rng), collect, recurse, direction)
}

/// `{v : c <= dist(v) <= r}` by textbook BFS over decoded records.
pub fn bfs_reference(g: &PropertyGraph, cfg: &TraversalConfig) -> BTreeSet<String> {
    let mut adjacency: HashMap<String, Vec<String>> = HashMap::new();
    for pos in 0..g.edge_count() {
        let (s, t, attrs) = g.edges.record(pos);
        if !cfg.predicate.matches(&|name: &str| attrs.get(name).map(String::as_str)) {
            continue;
        }
        let (from, to) = match cfg.direction {
            Direction::Forward => (s, t),
            Direction::Backward => (t, s),
        };
        adjacency.entry(from).or_default().push(to);
    }
    let mut dist: HashMap<String, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    for s in &cfg.start_vertices {
        dist.insert(s.clone(), 0);
        queue.push_back(s.clone());
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for v in adjacency.get(&u).into_iter().flatten() {
            if !dist.contains_key(v) {
                dist.insert(v.clone(), du + 1);
                queue.push_back(v.clone());
            }
        }
    }
    dist.into_iter()
        .filter(|&(_, d)| d >= cfg.collect && cfg.recurse.admits(d))
        .map(|(v, _)| v)
        .collect()
}
