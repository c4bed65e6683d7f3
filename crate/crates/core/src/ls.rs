//! Level-synchronous traversal: one partitioned scan of the whole scan column
//! per level, materializing the next working set from the fetch column.

use std::ops::Range;

use rayon::prelude::*;

use crate::bitset::Bitset;
use crate::engine::{LevelMap, PreparedConfig, TraversalCounters};
use crate::predicate::ActiveEdgeList;
use crate::storage::{ColumnHandles, EdgeColumnGroup, VertexCode};

/// Below this many records per scan the partitions run on the calling thread.
const PARALLEL_SCAN_THRESHOLD: usize = 1 << 15;

/// `n` contiguous logical partitions of the scanned positions, sizes within one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanPartitioning {
    partitions: Vec<Vec<Range<usize>>>,
}

impl ScanPartitioning {
    /// Partitions of `[0, len)`.
        pub fn new(n: usize, len: usize) -> Self {
        Self::over(n, &[0..len])
    }

    /// Partitions of the concatenation of `ranges`, which must be ascending
    /// and disjoint. A partition may straddle several ranges.
    pub fn over(n: usize, ranges: &[Range<usize>]) -> Self {
        let n = n.max(1);
        let total: usize = ranges.iter().map(|r| r.len()).sum();
        let mut partitions = vec![Vec::new(); n];
        let mut iter = ranges.iter().filter(|r| !r.is_empty()).cloned();
        let mut current = iter.next();
        for (i, partition) in partitions.iter_mut().enumerate() {
            let mut want = total / n + usize::from(i < total % n);
            while want > 0 {
                let Some(range) = current.as_mut() else { break };
                let take = want.min(range.len());
                partition.push(range.start..range.start + take);
                range.start += take;
                want -= take;
                if range.start == range.end {
                    current = iter.next();
                }
            }
        }
        Self { partitions }
    }

    pub fn partition_count(&self) -> usize {
        self.partitions.len()
    }

    pub fn partition(&self, i: usize) -> &[Range<usize>] {
        &self.partitions[i]
    }

    pub fn scanned_len(&self) -> usize {
        self.partitions.iter().flatten().map(|r| r.len()).sum()
    }
}

/// Strictly ascending edge positions hit by one scan.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositionList {
    positions: Vec<usize>,
}

impl PositionList {
    pub fn from_sorted(positions: Vec<usize>) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        Self { positions }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Membership structure for the current working set: a sorted vector when
/// small, a bitset over all codes once it exceeds `|V| / 64`.
#[derive(Clone, Debug)]
pub enum WorkingSet {
    Sparse(Vec<VertexCode>),
    Dense(Bitset),
}

impl WorkingSet {
    /// `codes` must be sorted and distinct.
    pub fn new(codes: &[VertexCode], vertex_count: usize) -> Self {
        if codes.len() > vertex_count / 64 {
            let mut bits = Bitset::new(vertex_count);
            for &c in codes {
                bits.insert(c as usize);
            }
            WorkingSet::Dense(bits)
        } else {
            WorkingSet::Sparse(codes.to_vec())
        }
    }

    #[inline]
    pub fn contains(&self, code: VertexCode) -> bool {
        match self {
            WorkingSet::Sparse(codes) => codes.binary_search(&code).is_ok(),
            WorkingSet::Dense(bits) => bits.contains(code as usize),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            WorkingSet::Sparse(codes) => codes.len(),
            WorkingSet::Dense(bits) => bits.count_ones(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn scan_partition(
    scan: &[VertexCode],
    working: &WorkingSet,
    ea: &ActiveEdgeList,
    ranges: &[Range<usize>],
) -> Vec<usize> {
    let mut hits = Vec::new();
    for range in ranges {
        for pos in range.clone() {
            if ea.is_active(pos) && working.contains(scan[pos]) {
                hits.push(pos);
            }
        }
    }
    hits
}

/// Positions of active edges whose scan-column code is in `working`. Every
/// returned position is invalidated in `ea`.
pub fn ls_scan(
    h: ColumnHandles<'_>,
    working: &WorkingSet,
    ea: &mut ActiveEdgeList,
    part: &ScanPartitioning,
) -> PositionList {
    let shared: &ActiveEdgeList = ea;
    let per_partition: Vec<Vec<usize>> = if part.partition_count() > 1 && part.scanned_len() >= PARALLEL_SCAN_THRESHOLD {
        part.partitions
            .par_iter()
            .map(|ranges| scan_partition(h.scan, working, shared, ranges))
            .collect()
    } else {
        part.partitions
            .iter()
            .map(|ranges| scan_partition(h.scan, working, shared, ranges))
            .collect()
    };
    let positions: Vec<usize> = per_partition.into_iter().flatten().collect();
    for &pos in &positions {
        ea.invalidate(pos);
    }
    PositionList::from_sorted(positions)
}

/// Distinct fetch-column codes at the listed positions, ascending.
pub fn ls_materialize(h: ColumnHandles<'_>, pl: &PositionList) -> Vec<VertexCode> {
    let mut codes: Vec<VertexCode> = pl.positions().iter().map(|&pos| h.fetch[pos]).collect();
    codes.sort_unstable();
    codes.dedup();
    codes
}

pub fn ls_traverse(pc: &PreparedConfig, g: &EdgeColumnGroup, part: &ScanPartitioning) -> (LevelMap, TraversalCounters) {
    let n = g.vertex_dictionary().len();
    let h = g.handles(pc.direction);
    let mut ea = pc.active.clone();
    let mut levels = LevelMap::new(n);
    let mut counters = TraversalCounters::default();
    for &s in &pc.starts {
        levels.set(s, 0);
    }

    let mut working = pc.starts.clone();
    let limit = pc.recurse.limit();
    let mut level = 0u32;
    while level < limit && !working.is_empty() {
        level += 1;
        let members = WorkingSet::new(&working, n);
        let pl = ls_scan(h, &members, &mut ea, part);
        counters.edges_read += part.scanned_len() as u64;
        counters.iterations += 1;
        working = ls_materialize(h, &pl);
        working.retain(|&v| levels.get(v).is_none());
        for &v in &working {
            levels.set(v, level);
        }
    }
    (levels, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{generate_result, prepare, Depth, TraversalConfig};
    use crate::predicate::parse;
    use crate::storage::tests::fixture;
    use crate::storage::Direction;

    #[test]
    fn partitioning_is_balanced_and_covering() {
        for n in 1..10 {
            for len in [0, 1, 5, 17, 64, 100] {
                let part = ScanPartitioning::new(n, len);
                assert_eq!(part.partition_count(), n);
                let sizes: Vec<usize> = (0..n).map(|i| part.partition(i).iter().map(|r| r.len()).sum()).collect();
                assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
                let covered: Vec<usize> = (0..n).flat_map(|i| part.partition(i).to_vec()).flatten().collect();
                assert_eq!(covered, (0..len).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn partitioning_over_ranges() {
        let part = ScanPartitioning::over(2, &[0..3, 10..13]);
        assert_eq!(part.partition(0), &[0..3]);
        assert_eq!(part.partition(1), &[10..13]);
        let part = ScanPartitioning::over(4, &[2..4, 7..9]);
        assert_eq!(part.scanned_len(), 4);
        assert_eq!(part.partition(1), &[3..4]);
        assert_eq!(part.partition(2), &[7..8]);
    }

    #[test]
    fn working_set_representations_agree() {
        let codes = [1, 5, 9, 200];
        let sparse = WorkingSet::new(&codes, 1000);
        let dense = WorkingSet::new(&codes, 201);
        assert!(matches!(sparse, WorkingSet::Sparse(_)));
        assert!(matches!(dense, WorkingSet::Dense(_)));
        for c in 0..201 {
            assert_eq!(sparse.contains(c), dense.contains(c));
        }
    }

    #[test]
    fn scan_invalidates_and_materializes() {
        let g = fixture().edge_clustered().unwrap();
        let cfg = TraversalConfig::new(["A"], parse("type=a").unwrap(), 0, 1.into(), Direction::Forward);
        let pc = prepare(&cfg, &g.edges).unwrap();
        let h = g.edges.handles(Direction::Forward);
        let d = g.vertex_dictionary();
        let a = d.encode("A").unwrap();
        let mut ea = pc.active.clone();
        let part = ScanPartitioning::new(2, g.edge_count());
        let pl = ls_scan(h, &WorkingSet::new(&[a], 6), &mut ea, &part);
        assert_eq!(pl.positions(), &[0, 1, 2]);
        let naive: Vec<usize> = (0..6).filter(|&i| pc.active.is_active(i) && h.scan[i] == a).collect();
        assert_eq!(pl.positions(), naive.as_slice());
        let targets: Vec<_> = ls_materialize(h, &pl).iter().map(|&c| d.decode(c).unwrap()).collect();
        assert_eq!(targets, ["B", "C", "D"]);
        assert!(ls_scan(h, &WorkingSet::new(&[a], 6), &mut ea, &part).is_empty());
        let e = d.encode("E").unwrap();
        assert!(ls_scan(h, &WorkingSet::new(&[e], 6), &mut ea, &part).is_empty());
        assert!(ls_materialize(h, &PositionList::default()).is_empty());
    }

    #[test]
    fn materialize_dedups_targets() {
        let g = fixture();
        let h = g.edges.handles(Direction::Forward);
        // (A,C) and (D,C) share a target.
        let pl = PositionList::from_sorted(vec![1, 4]);
        assert_eq!(ls_materialize(h, &pl).len(), 1);
    }

    #[test]
    fn traverse_fixture_levels() {
        let g = fixture();
        let d = g.vertex_dictionary();
        let cfg = TraversalConfig::new(["A"], parse("type=a").unwrap(), 0, 1.into(), Direction::Forward);
        let pc = prepare(&cfg, &g.edges).unwrap();
        let (levels, counters) = ls_traverse(&pc, &g.edges, &ScanPartitioning::new(3, 6));
        let got: Vec<_> = levels.iter().map(|(v, l)| (d.decode(v).unwrap(), l)).collect();
        assert_eq!(got, [("A", 0), ("B", 1), ("C", 1), ("D", 1)]);
        assert_eq!(counters.edges_read, 6);
        assert_eq!(generate_result(&levels, 0, 1.into()).len(), 4);

        let cfg = TraversalConfig::new(["A"], parse("*").unwrap(), 0, Depth::Finite(50), Direction::Forward);
        let pc = prepare(&cfg, &g.edges).unwrap();
        let (_, counters) = ls_traverse(&pc, &g.edges, &ScanPartitioning::new(1, 6));
        // A -> {B,C,D} -> {C,E,F} minus seen -> {E,F} -> {} : three scans.
        assert_eq!(counters.iterations, 3);
        assert_eq!(counters.edges_read, 18);
    }
}
