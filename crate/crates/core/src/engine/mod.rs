//! Traversal semantics and orchestration.
//!
//! A traversal runs in three phases. *Prepare* encodes the start vertices and
//! pushes the edge predicate down to the edge group. *Traverse* runs one of
//! the physical operators, picked by the cost-based controller unless
//! overridden, and produces a [`LevelMap`]. *Decode* turns the selected codes
//! back into vertex identifiers.
//!
//! Results use the min-level characterization: a vertex is returned iff
//! `c <= min_level(v) <= r`. This equals the set-difference definition over
//! the per-level discovery sets, since every appearance of `v` at level `i`
//! satisfies `i >= min_level(v)` and `v` appears at `min_level(v)`.
//! [`oracle_traverse`] evaluates the set-difference definition literally and
//! is the reference every operator is tested against.

mod controller;
mod cost;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::Bitset;
use crate::fi::IndexError;
use crate::predicate::{evaluate, ActiveEdgeList, Predicate, PredicateError};
use crate::storage::{Dictionary, Direction, EdgeColumnGroup, VertexCode, TYPE_ATTRIBUTE};

pub use controller::{
    choose_operator, traverse, ExecutionReport, Operator, PhaseTimes, TraversalOutcome, Traverser,
};
pub use cost::{cost_fi, cost_ls, CostParams};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unknown start vertex {0:?}")]
    UnknownStartVertex(String),
    #[error("collection boundary {collect} exceeds recursion boundary {recurse}")]
    BoundaryOrder { collect: u32, recurse: Depth },
    #[error("invalid cost parameters: {0}")]
    InvalidCostParams(String),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Recursion boundary: a hop count or unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Finite(u32),
    Unbounded,
}

impl Depth {
    /// Loop bound; `u32::MAX` stands in for unbounded.
    pub fn limit(self) -> u32 {
        match self {
            Depth::Finite(r) => r,
            Depth::Unbounded => u32::MAX,
        }
    }

    pub fn admits(self, level: u32) -> bool {
        level <= self.limit()
    }
}

impl From<u32> for Depth {
    fn from(r: u32) -> Self {
        Depth::Finite(r)
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(r) => write!(f, "{r}"),
            Depth::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Depth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "*" => Ok(Depth::Unbounded),
            other => other
                .parse()
                .map(Depth::Finite)
                .map_err(|_| format!("invalid depth {other:?}; expected a hop count or 'inf'")),
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Depth::Finite(r) => s.serialize_u32(*r),
            Depth::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Hops(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Hops(r) => Ok(Depth::Finite(r)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The tuple `(S, φ, c, r, d)` in vertex-identifier form.
#[derive(Clone, Debug, PartialEq)]
pub struct TraversalConfig {
    pub start_vertices: BTreeSet<String>,
    pub predicate: Predicate,
    pub collect: u32,
    pub recurse: Depth,
    pub direction: Direction,
}

impl TraversalConfig {
    pub fn new<I, S>(starts: I, predicate: Predicate, collect: u32, recurse: Depth, direction: Direction) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            start_vertices: starts.into_iter().map(Into::into).collect(),
            predicate,
            collect,
            recurse,
            direction,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !self.recurse.admits(self.collect) {
            return Err(EngineError::BoundaryOrder {
                collect: self.collect,
                recurse: self.recurse,
            });
        }
        Ok(())
    }
}

/// Encoded configuration handed to the operators.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedConfig {
    /// Sorted, distinct start codes.
    pub starts: Vec<VertexCode>,
    pub active: ActiveEdgeList,
    pub collect: u32,
    pub recurse: Depth,
    pub direction: Direction,
    /// Position ranges that may hold active edges. Narrower than the whole
    /// column only for type-only predicates on type-clustered groups.
    pub scan_ranges: Vec<Range<usize>>,
}

impl PreparedConfig {
    pub fn scanned_len(&self) -> usize {
        self.scan_ranges.iter().map(|r| r.len()).sum()
    }
}

pub fn prepare(cfg: &TraversalConfig, g: &EdgeColumnGroup) -> Result<PreparedConfig, EngineError> {
    cfg.validate()?;
    let dictionary = g.vertex_dictionary();
    let mut starts = cfg
        .start_vertices
        .iter()
        .map(|id| dictionary.encode(id).ok_or_else(|| EngineError::UnknownStartVertex(id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    starts.sort_unstable();
    starts.dedup();

    let active = evaluate(&cfg.predicate, g, None)?;
    let type_only = cfg.predicate.attributes().iter().all(|a| *a == TYPE_ATTRIBUTE);
    let scan_ranges = match g.type_ranges() {
        Some(ranges) if type_only && !matches!(cfg.predicate, Predicate::True) => {
            let mut out: Vec<Range<usize>> = Vec::new();
            for range in ranges.values() {
                if range.is_empty() || !active.is_active(range.start) {
                    continue;
                }
                match out.last_mut() {
                    Some(last) if last.end == range.start => last.end = range.end,
                    _ => out.push(range.clone()),
                }
            }
            out
        }
                _ => vec![0..g.len()],
    };

    Ok(PreparedConfig {
        starts,
        active,
        collect: cfg.collect,
        recurse: cfg.recurse,
        direction: cfg.direction,
        scan_ranges,
    })
}

/// Work counters reported by the operators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalCounters {
    /// Edge records whose scan-column cell was inspected.
    pub edges_read: u64,
    pub fragments_read: u64,
    /// Level iterations (LS) or fragment passes (FI).
    pub iterations: u64,
}

const UNSEEN: u32 = u32::MAX;

/// Smallest discovery level per vertex code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMap {
    levels: Vec<u32>,
}

impl LevelMap {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            levels: vec![UNSEEN; vertex_count],
        }
    }

    pub fn from_levels<I: IntoIterator<Item = (VertexCode, u32)>>(vertex_count: usize, levels: I) -> Self {
        let mut map = Self::new(vertex_count);
        for (v, l) in levels {
            map.set(v, l);
        }
        map
    }

    #[inline]
    pub fn get(&self, v: VertexCode) -> Option<u32> {
        let l = self.levels[v as usize];
        (l != UNSEEN).then_some(l)
    }

    #[inline]
    pub fn set(&mut self, v: VertexCode, level: u32) {
        debug_assert_ne!(level, UNSEEN);
        self.levels[v as usize] = level;
    }

    /// Raw level of `v`, `u32::MAX` when undiscovered.
    #[inline]
    pub(crate) fn raw(&self, v: VertexCode) -> u32 {
        self.levels[v as usize]
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexCode, u32)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != UNSEEN)
            .map(|(v, &l)| (v as VertexCode, l))
    }

    pub fn discovered(&self) -> usize {
        self.levels.iter().filter(|&&l| l != UNSEEN).count()
    }

    /// Members of the discovery set at `level`.
    pub fn at_level(&self, level: u32) -> Vec<VertexCode> {
        self.iter().filter(|&(_, l)| l == level).map(|(v, _)| v).collect()
    }
}

/// `{v : c <= min_level(v) <= r}`, ascending.
pub fn generate_result(levels: &LevelMap, collect: u32, recurse: Depth) -> Vec<VertexCode> {
    levels
        .iter()
        .filter(|&(_, l)| l >= collect && recurse.admits(l))
        .map(|(v, _)| v)
        .collect()
}

pub fn decode(result: &[VertexCode], dictionary: &Dictionary) -> Result<BTreeSet<String>, EngineError> {
    result
        .iter()
        .map(|&c| {
            dictionary
                .decode(c)
                .map(str::to_string)
                .ok_or_else(|| EngineError::Internal(format!("result code {c} is not in the vertex dictionary")))
        })
        .collect()
}

/// Reference semantics: per-level discovery sets by full enumeration of the
/// active edges, then target levels minus visited levels. Edges are never
/// consumed and vertices may be rediscovered at any level.
pub fn oracle_traverse(pc: &PreparedConfig, g: &EdgeColumnGroup) -> Vec<VertexCode> {
    let n = g.vertex_dictionary().len();
    let handles = g.handles(pc.direction);
    let active: Vec<usize> = pc.active.iter_active().collect();
    let collect = pc.collect;
    let limit = pc.recurse.limit();

    let mut current = Bitset::new(n);
    for &s in &pc.starts {
        current.insert(s as usize);
    }
    let mut seen = current.clone();
    let mut visited = Bitset::new(n);
    let mut target = Bitset::new(n);
    let record = |level: u32, set: &Bitset, visited: &mut Bitset, target: &mut Bitset| {
        if level < collect {
            visited.union_with(set);
        } else {
            target.union_with(set);
        }
    };
    record(0, &current, &mut visited, &mut target);

    let mut level = 0u32;
    while level < limit && current.count_ones() > 0 {
        level += 1;
        let mut next = Bitset::new(n);
        for &pos in &active {
            if current.contains(handles.scan[pos] as usize) {
                next.insert(handles.fetch[pos] as usize);
            }
        }
        record(level, &next, &mut visited, &mut target);
        let before = seen.count_ones();
        seen.union_with(&next);
        // Once the union of all levels stops growing it never grows again,
        // and every vertex not yet visited has already reached the target side.
        if seen.count_ones() == before && level >= collect {
            break;
        }
        current = next;
    }

    let mut result = target;
    visited.negate();
    result.intersect_with(&visited);
    result.iter_ones().map(|v| v as VertexCode).collect()
}
