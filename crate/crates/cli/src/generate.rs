//! Seeded synthetic graphs.
//!
//! Vertex ids are `v` plus a zero-padded index, so the dictionary order is
//! the index order. Edge order is shuffled with the seed, so the loaded
//! layout carries no topological locality until it is clustered.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use colgraph::{build_graph_indexed, Column, Dictionary, PropertyGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of the optional zipf-distributed integer edge attribute.
pub const WEIGHT_ATTRIBUTE: &str = "weight";
/// Weights are drawn from `1..=WEIGHT_MAX`.
pub const WEIGHT_MAX: u32 = 100;
const WEIGHT_EXPONENT: f64 = 2.0;
const SINGLE_TYPE: &str = "e";

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("cannot parse generator {0:?}; expected powerlaw:ALPHA:DEGREE:N, grid:W:H, path:N, star:N or uniform:N:DEGREE[:TYPES]")]
    Syntax(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// Chung-Lu style graph with expected degrees following a power law of
    /// exponent `alpha`; `n` vertices and about `avg_degree * n` distinct edges.
    PowerLaw { alpha: f64, avg_degree: f64, n: usize },
    /// Bidirectional 4-neighbour lattice.
    Grid { width: usize, height: usize },
    /// `v0 -> v1 -> ... -> v(n-1)`.
    Path { n: usize },
    /// Hub `v0` with edges to `n` leaves.
    Star { n: usize },
    /// Uniform multigraph with `types` edge types named `a`, `b`, ...
    Uniform { n: usize, avg_degree: f64, types: u32 },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphKind::PowerLaw { alpha, avg_degree, n } => write!(f, "powerlaw:{alpha}:{avg_degree}:{n}"),
            GraphKind::Grid { width, height } => write!(f, "grid:{width}:{height}"),
            GraphKind::Path { n } => write!(f, "path:{n}"),
            GraphKind::Star { n } => write!(f, "star:{n}"),
            GraphKind::Uniform { n, avg_degree, types } => write!(f, "uniform:{n}:{avg_degree}:{types}"),
        }
    }
}

impl FromStr for GraphKind {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || GenerateError::Syntax(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| parts.get(i).and_then(|p| p.parse::<usize>().ok()).ok_or_else(syntax);
        let real = |i: usize| parts.get(i).and_then(|p| p.parse::<f64>().ok()).ok_or_else(syntax);
        let kind = match (parts[0], parts.len()) {
            ("powerlaw", 4) => GraphKind::PowerLaw {
                alpha: real(1)?,
                avg_degree: real(2)?,
                n: int(3)?,
            },
            ("grid", 3) => GraphKind::Grid {
                width: int(1)?,
                height: int(2)?,
            },
            ("path", 2) => GraphKind::Path { n: int(1)? },
            ("star", 2) => GraphKind::Star { n: int(1)? },
            ("uniform", 3 | 4) => GraphKind::Uniform {
                n: int(1)?,
                avg_degree: real(2)?,
                types: if parts.len() == 4 { int(3)? as u32 } else { 1 },
            },
            _ => return Err(syntax()),
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl GraphKind {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |m: &str| Err(GenerateError::InvalidParameters(m.to_string()));
        match *self {
            GraphKind::PowerLaw { alpha, avg_degree, n } => {
                if alpha.is_nan() || alpha <= 1.0 {
                    return bad("power-law exponent must exceed 1");
                }
                if avg_degree.is_nan() || avg_degree <= 0.0 || n < 2 {
                    return bad("power-law graphs need a positive degree and at least 2 vertices");
                }
                if avg_degree > (n - 1) as f64 / 2.0 {
                    return bad("average degree too large for a simple graph of this size");
                }
            }
            GraphKind::Grid { width, height } if width == 0 || height == 0 => return bad("grid sides must be positive"),
            GraphKind::Path { n } | GraphKind::Star { n } if n == 0 => return bad("size must be positive"),
            GraphKind::Uniform { n, avg_degree, types }
                if n == 0 || avg_degree.is_nan() || avg_degree <= 0.0 || !(1..=26).contains(&types) =>
            {
                return bad("uniform graphs need n > 0, a positive degree and 1 to 26 types")
            }
            _ => {}
        }
        Ok(())
    }
}

fn vertex_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("v{i:0width$}")).collect()
}

fn power_law_edges(alpha: f64, avg_degree: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let exponent = -1.0 / (alpha - 1.0);
    let weights: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(exponent)).collect();
    let pick = WeightedAliasIndex::new(weights).expect("positive weights");
    let wanted = (avg_degree * n as f64).round() as usize;
    let mut seen = HashSet::with_capacity(wanted);
    let mut edges = Vec::with_capacity(wanted);
    let mut attempts = 0usize;
    let budget = wanted.saturating_mul(200).max(1000);
    while edges.len() < wanted && attempts < budget {
        attempts += 1;
        let s = pick.sample(rng);
        let t = pick.sample(rng);
        if s != t && seen.insert((s, t)) {
            edges.push((s, t));
        }
    }
    // Heavy tails saturate the hubs; fill the remainder uniformly.
    while edges.len() < wanted {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        if s != t && seen.insert((s, t)) {
            edges.push((s, t));
        }
    }
    edges
}

fn grid_edges(width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(2 * (2 * width * height - width - height));
    for y in 0..height {
        for x in 0..width {
            let v = y * width + x;
            if x + 1 < width {
                edges.push((v, v + 1));
                edges.push((v + 1, v));
            }
            if y + 1 < height {
                edges.push((v, v + width));
                edges.push((v + width, v));
            }
        }
    }
    edges
}

/// Generates `kind` under `seed`, optionally with zipf weights in `1..=100`.
pub fn generate(kind: &GraphKind, seed: u64, weights: bool) -> Result<PropertyGraph, GenerateError> {
    kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, mut edges, types): (usize, Vec<(usize, usize)>, u32) = match *kind {
        GraphKind::PowerLaw { alpha, avg_degree, n } => (n, power_law_edges(alpha, avg_degree, n, &mut rng), 1),
        GraphKind::Grid { width, height } => (width * height, grid_edges(width, height), 1),
        GraphKind::Path { n } => (n, (1..n).map(|i| (i - 1, i)).collect(), 1),
        GraphKind::Star { n } => (n + 1, (1..=n).map(|i| (0, i)).collect(), 1),
        GraphKind::Uniform { n, avg_degree, types } => {
            let m = (avg_degree * n as f64).round().max(1.0) as usize;
            let edges = (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
            (n, edges, types)
        }
    };
    edges.shuffle(&mut rng);

    let mut attributes = BTreeMap::new();
    let type_column = if types == 1 {
        Column::from_codes(Dictionary::from_values([SINGLE_TYPE]), vec![Some(0); edges.len()])
    } else {
        let names: Vec<String> = (0..types).map(|t| char::from(b'a' + t as u8).to_string()).collect();
        let codes = edges.iter().map(|_| Some(rng.random_range(0..types))).collect();
        Column::from_codes(Dictionary::from_values(&names), codes)
    };
    attributes.insert(colgraph::storage::TYPE_ATTRIBUTE.to_string(), type_column);
    if weights {
        let zipf = Zipf::new(f64::from(WEIGHT_MAX), WEIGHT_EXPONENT).expect("valid zipf parameters");
        let values: Vec<String> = edges.iter().map(|_| (zipf.sample(&mut rng) as u32).to_string()).collect();
        attributes.insert(WEIGHT_ATTRIBUTE.to_string(), Column::from_values(values.iter().map(|v| Some(v.as_str()))));
    }
    build_graph_indexed(&vertex_ids(n), &edges, attributes)
        .map_err(|e| GenerateError::InvalidParameters(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use colgraph::{compute_stats, Direction};

    fn edge_list(g: &PropertyGraph) -> Vec<(String, String, BTreeMap<String, String>)> {
        (0..g.edge_count()).map(|i| g.edges.record(i)).collect()
    }

    #[test]
    fn path_shape() {
        let g = generate(&GraphKind::Path { n: 5 }, 1, false).unwrap();
        assert_eq!(g.edge_count(), 4);
        let stats = compute_stats(&g.edges, &g.vertices, 64, 0);
        assert_eq!(stats.est_diameter, 4.0);
    }

    #[test]
    fn grid_edge_count() {
        let g = generate(&GraphKind::Grid { width: 10, height: 10 }, 1, false).unwrap();
        assert_eq!(g.edge_count(), 2 * (2 * 10 * 10 - 10 - 10));
        assert_eq!(g.edge_count(), 360);
        let g = generate(&GraphKind::Grid { width: 3, height: 1 }, 1, false).unwrap();
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn star_shape() {
        let g = generate(&GraphKind::Star { n: 4 }, 3, false).unwrap();
        let stats = compute_stats(&g.edges, &g.vertices, 64, 0);
        assert_eq!((stats.vertex_count, stats.max_outdegree, stats.est_diameter), (5, 4, 1.0));
    }

    #[test]
    fn deterministic_under_seed() {
        let kind = GraphKind::PowerLaw {
            alpha: 2.2,
            avg_degree: 8.0,
            n: 2000,
        };
        let a = generate(&kind, 9, true).unwrap();
        let b = generate(&kind, 9, true).unwrap();
        assert_eq!(edge_list(&a), edge_list(&b));
        let c = generate(&kind, 10, true).unwrap();
        assert_ne!(edge_list(&a), edge_list(&c));
    }

    #[test]
    fn power_law_is_simple_and_skewed() {
        let kind = GraphKind::PowerLaw {
            alpha: 2.2,
            avg_degree: 8.0,
            n: 5000,
        };
        let g = generate(&kind, 4, false).unwrap();
        assert_eq!(g.edge_count(), 40_000);
        let h = g.edges.handles(Direction::Forward);
        let pairs: HashSet<_> = h.scan.iter().zip(h.fetch).collect();
        assert_eq!(pairs.len(), g.edge_count());
        assert!(h.scan.iter().zip(h.fetch).all(|(s, t)| s != t));
        let stats = compute_stats(&g.edges, &g.vertices, 64, 0);
        assert!(stats.max_outdegree as f64 > 20.0 * stats.avg_outdegree, "{stats:?}");
    }

    #[test]
    fn zipf_weights_in_range() {
        let g = generate(&GraphKind::Uniform { n: 100, avg_degree: 20.0, types: 3 }, 2, true).unwrap();
        let w = g.edges.attribute(WEIGHT_ATTRIBUTE).unwrap();
        let values: Vec<u32> = (0..g.edge_count()).map(|i| w.value(i).unwrap().parse().unwrap()).collect();
        assert!(values.iter().all(|&v| (1..=WEIGHT_MAX).contains(&v)));
        let ones = values.iter().filter(|&&v| v == 1).count() as f64 / values.len() as f64;
        // P(1) = 1 / H(100, 2) ≈ 0.61.
        assert!((ones - 0.61).abs() < 0.05, "{ones}");
        assert_eq!(g.edges.attribute("type").unwrap().dictionary().len(), 3);
    }

    #[test]
    fn ids_sort_numerically() {
        let ids = vertex_ids(12);
        assert_eq!(ids[3], "v03");
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(sorted, ids);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("grid:100:100".parse::<GraphKind>().unwrap(), GraphKind::Grid { width: 100, height: 100 });
        assert_eq!(
            "powerlaw:2.2:30:10000".parse::<GraphKind>().unwrap(),
            GraphKind::PowerLaw { alpha: 2.2, avg_degree: 30.0, n: 10000 }
        );
        assert_eq!("uniform:10:2".parse::<GraphKind>().unwrap(), GraphKind::Uniform { n: 10, avg_degree: 2.0, types: 1 });
        for bad in ["grid:0:3", "path", "powerlaw:1.0:3:100", "torus:3", "star:x"] {
            assert!(bad.parse::<GraphKind>().is_err(), "{bad}");
        }
        let kind = GraphKind::Path { n: 7 };
        assert_eq!(kind.to_string().parse::<GraphKind>().unwrap(), kind);
    }
}
