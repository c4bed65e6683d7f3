//! Topology statistics consumed by the cost models.

use std::collections::VecDeque;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EdgeColumnGroup, VertexColumnGroup};

pub const DEFAULT_STATS_SAMPLE: usize = 64;
const DIAMETER_PERCENTILE: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub avg_outdegree: f64,
    pub max_outdegree: usize,
    /// Effective diameter in hops.
    pub est_diameter: f64,
}

/// Exact counts and degrees plus a sampled effective diameter.
///
/// The diameter is the 90th percentile of forward BFS eccentricities taken
/// from `min(sample_size, |V|)` distinct vertices drawn with `seed`. The
/// percentile interpolates at rank `p * (n + 1)` clamped to `[1, n]`.
pub fn compute_stats(
    edges: &EdgeColumnGroup,
    vertices: &VertexColumnGroup,
    sample_size: usize,
    seed: u64,
) -> GraphStats {
    let n = vertices.len();
    let m = edges.len();
    if n == 0 {
        return GraphStats {
            vertex_count: 0,
            edge_count: m,
            avg_outdegree: 0.0,
            max_outdegree: 0,
            est_diameter: 0.0,
        };
    }

    let mut offsets = vec![0usize; n + 1];
    for &s in edges.source() {
        offsets[s as usize + 1] += 1;
    }
    let max_outdegree = offsets.iter().copied().max().unwrap_or(0);
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut adjacency = vec![0u32; m];
    for (&s, &t) in edges.source().iter().zip(edges.target()) {
        adjacency[fill[s as usize]] = t;
        fill[s as usize] += 1;
    }

    let sources: Vec<usize> = if sample_size >= n {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, n, sample_size.max(1)).into_vec();
        picked.sort_unstable();
        picked
    };

    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let mut eccentricities: Vec<f64> = sources
        .iter()
        .map(|&s| {
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push_back(s);
            let mut ecc = 0;
            while let Some(u) = queue.pop_front() {
                let du = dist[u];
                ecc = ecc.max(du);
                for &v in &adjacency[offsets[u]..offsets[u + 1]] {
                    let v = v as usize;
                    if dist[v] == u32::MAX {
                        dist[v] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
            ecc as f64
        })
        .collect();
    eccentricities.sort_by(f64::total_cmp);

    GraphStats {
        vertex_count: n,
        edge_count: m,
        avg_outdegree: m as f64 / n as f64,
        max_outdegree,
        est_diameter: percentile(&eccentricities, DIAMETER_PERCENTILE),
    }
}

/// Percentile of sorted data at rank `p (n + 1)`, clamped and linearly interpolated.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    let rank = (p * (n as f64 + 1.0)).clamp(1.0, n as f64);
    let lo = rank.floor() as usize;
    let frac = rank - lo as f64;
    let a = sorted[lo - 1];
    let b = sorted[lo.min(n - 1)];
    a + frac * (b - a)
}
