//! Fragmented-incremental traversal.
//!
//! The scan column is cut into fragments, each summarized by a bloom filter
//! over its scan-column codes. A traversal reads one fragment at a time,
//! materializes discoveries immediately, and picks the next fragment by
//! probing the synopses of the last fragment's TGI successors with the newly
//! discovered vertices.
//!
//! Fragment order can discover a vertex over a long path before a short one.
//! The runtime therefore keeps minimal levels: when a vertex's level drops it
//! becomes a frontier again and the outgoing edges it already consumed are
//! re-activated, so their targets can be re-derived at the lower level.

mod bloom;
mod tgi;

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::bitset::Bitset;
use crate::engine::{LevelMap, PreparedConfig, TraversalCounters};
use crate::ls::PositionList;
use crate::predicate::ActiveEdgeList;
use crate::storage::{ColumnHandles, Direction, EdgeColumnGroup, VertexCode};

pub use bloom::BloomFilter;
pub use tgi::{Fragment, FragmentPolicy, TgiReport, TransitionGraphIndex};

#[cfg(test)]
pub(crate) use tgi::tests::fragment_fixture;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("fragment size must be at least 1")]
    InvalidFragmentSize,
    #[error("false-positive rate must lie in (0, 1), got {0}")]
    InvalidFalsePositiveRate(f64),
    #[error("degree-adaptive fragments need an edge-clustered layout; cluster by type, then by edge")]
    NotEdgeClustered,
    #[error("index was built for {built:?} traversal, query runs {query:?}")]
    DirectionMismatch { built: Direction, query: Direction },
    #[error("index covers {indexed} edges but the edge group holds {actual}")]
    StaleIndex { indexed: usize, actual: usize },
}

/// Per-query scheduling state.
#[derive(Clone, Debug)]
pub struct FiRuntimeState {
    pub levels: LevelMap,
    /// Fragments in the order they were read.
    pub chain: Vec<usize>,
    /// Vertices discovered or improved since the last fragment selection.
    pub frontiers: Vec<VertexCode>,
    /// Source levels `0..s_factor` are probed by the next scan.
    pub s_factor: u32,
    /// Levels materialized by the last pass.
    pub m_factor: u32,
    limit: u32,
    queue: BTreeSet<(Reverse<u32>, usize)>,
    priority: Vec<u32>,
    invalidation: HashSet<(usize, VertexCode)>,
    counted: HashMap<VertexCode, Vec<usize>>,
    consumed: HashMap<VertexCode, Vec<usize>>,
    eligible: Bitset,
}

impl FiRuntimeState {
    /// Level-0 state for `pc` with every fragment of `tgi` that overlaps the
    /// scanned ranges eligible for scheduling.
    pub fn new(pc: &PreparedConfig, tgi: &TransitionGraphIndex, vertex_count: usize) -> Self {
        let fragment_count = tgi.fragment_count();
        let mut eligible = Bitset::new(fragment_count);
        for f in tgi.fragments() {
            if pc
                .scan_ranges
                .iter()
                .any(|r| r.start < f.range.end && f.range.start < r.end)
            {
                eligible.insert(f.id);
            }
        }
        let mut levels = LevelMap::new(vertex_count);
        for &s in &pc.starts {
            levels.set(s, 0);
        }
        Self {
            levels,
            chain: Vec::new(),
            frontiers: Vec::new(),
            s_factor: 1,
            m_factor: 1,
            limit: pc.recurse.limit(),
            queue: BTreeSet::new(),
            priority: vec![0; fragment_count],
            invalidation: HashSet::new(),
            counted: HashMap::new(),
            consumed: HashMap::new(),
            eligible,
        }
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }

    pub fn priority(&self, fragment: usize) -> u32 {
        self.priority[fragment]
    }

    /// Counts `v` towards `fragment` unless that pair was already counted.
    fn probe_hit(&mut self, fragment: usize, v: VertexCode) {
        if !self.invalidation.insert((fragment, v)) {
            return;
        }
        self.counted.entry(v).or_default().push(fragment);
        let old = self.priority[fragment];
        if old > 0 {
            self.queue.remove(&(Reverse(old), fragment));
        }
        self.priority[fragment] = old + 1;
        self.queue.insert((Reverse(old + 1), fragment));
    }

    /// Enqueues every eligible fragment whose synopsis admits a level-0 vertex.
    pub fn seed(&mut self, tgi: &TransitionGraphIndex, starts: &[VertexCode]) {
        if self.limit == 0 {
            return;
        }
        for f in tgi.fragments() {
            if !self.eligible.contains(f.id) {
                continue;
            }
            for &s in starts {
                if f.synopsis.contains(s) {
                    self.probe_hit(f.id, s);
                }
            }
        }
    }
}

/// Probes the successors of the chain's last fragment with the frontiers,
/// then removes and returns the highest-priority fragment (lowest start on
/// ties). `None` once the queue is empty.
pub fn get_next_fragment(state: &mut FiRuntimeState, tgi: &TransitionGraphIndex) -> Option<usize> {
    if let Some(&last) = state.chain.last() {
        let mut frontiers = std::mem::take(&mut state.frontiers);
        frontiers.sort_unstable();
        frontiers.dedup();
        // Vertices at the recursion boundary cannot lead to recorded discoveries.
        frontiers.retain(|&v| state.levels.raw(v) < state.limit);
        if !frontiers.is_empty() {
            for b in tgi.transitions_from(last) {
                if !state.eligible.contains(b) {
                    continue;
                }
                let synopsis = &tgi.fragments()[b].synopsis;
                let hits: Vec<VertexCode> = frontiers.iter().copied().filter(|&v| synopsis.contains(v)).collect();
                for v in hits {
                    state.probe_hit(b, v);
                }
            }
        }
    }
    state.frontiers.clear();
    let (Reverse(_), next) = state.queue.pop_first()?;
    state.priority[next] = 0;
    state.chain.push(next);
    Some(next)
}

/// Scans one fragment against every probed level at once. List `i` of the
/// result holds the positions that discover level `i + 1`; each is consumed.
pub fn n_way_scan(
    h: ColumnHandles<'_>,
    frag: &Fragment,
    state: &mut FiRuntimeState,
    ea: &mut ActiveEdgeList,
    counters: &mut TraversalCounters,
) -> Vec<PositionList> {
    let probed = state.s_factor.min(state.limit);
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); probed as usize];
    for pos in frag.range.clone() {
        if !ea.is_active(pos) {
            continue;
        }
        let source = h.scan[pos];
        let level = state.levels.raw(source);
        if level < probed {
            lists[level as usize].push(pos);
            ea.invalidate(pos);
            state.consumed.entry(source).or_default().push(pos);
        }
    }
    counters.edges_read += frag.range.len() as u64;
    counters.fragments_read += 1;
    lists.into_iter().map(PositionList::from_sorted).collect()
}

/// Records discoveries in level order. A vertex whose level drops is
/// re-frontiered and gets its consumed outgoing edges back.
pub fn n_way_materialize(
    h: ColumnHandles<'_>,
    lists: &[PositionList],
    state: &mut FiRuntimeState,
    ea: &mut ActiveEdgeList,
) {
    for (i, list) in lists.iter().enumerate() {
        let level = i as u32 + 1;
        for &pos in list.positions() {
            let v = h.fetch[pos];
            let old = state.levels.raw(v);
            if level >= old {
                continue;
            }
            state.levels.set(v, level);
            state.frontiers.push(v);
            if old != u32::MAX {
                if let Some(positions) = state.consumed.remove(&v) {
                    for p in positions {
                        ea.restore(p);
                    }
                }
                if let Some(fragments) = state.counted.remove(&v) {
                    for f in fragments {
                        state.invalidation.remove(&(f, v));
                    }
                }
            }
        }
    }
    state.m_factor = lists.len().max(1) as u32;
    if state.s_factor < state.limit {
        state.s_factor += 1;
    }
}

/// Result of one FI run.
#[derive(Clone, Debug)]
pub struct FiRun {
    pub levels: LevelMap,
    pub counters: TraversalCounters,
    pub chain: Vec<usize>,
}

pub fn fi_traverse(pc: &PreparedConfig, g: &EdgeColumnGroup, tgi: &TransitionGraphIndex) -> Result<FiRun, IndexError> {
    if tgi.direction() != pc.direction {
        return Err(IndexError::DirectionMismatch {
            built: tgi.direction(),
            query: pc.direction,
        });
    }
    if tgi.edge_count() != g.len() {
        return Err(IndexError::StaleIndex {
            indexed: tgi.edge_count(),
            actual: g.len(),
        });
    }
    let h = g.handles(pc.direction);
    let mut state = FiRuntimeState::new(pc, tgi, g.vertex_dictionary().len());
    let mut ea = pc.active.clone();
    let mut counters = TraversalCounters::default();
    state.seed(tgi, &pc.starts);
    while let Some(next) = get_next_fragment(&mut state, tgi) {
        let lists = n_way_scan(h, &tgi.fragments()[next], &mut state, &mut ea, &mut counters);
        n_way_materialize(h, &lists, &mut state, &mut ea);
        counters.iterations += 1;
    }
    Ok(FiRun {
        levels: state.levels,
        counters,
        chain: state.chain,
    })
}
