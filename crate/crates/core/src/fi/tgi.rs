use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BloomFilter, IndexError};
use crate::bitset::Bitset;
use crate::storage::{Direction, EdgeColumnGroup, EdgeLayout, VertexCode};

/// Bytes charged per fragment for its range, filter parameters and
/// transition-list offset.
const FRAGMENT_DESCRIPTOR_BYTES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FragmentPolicy {
    /// Every fragment holds `ξ` records, the last possibly fewer.
    Fixed(usize),
    /// Fragments grow until they hold at least `min_size` records and then
    /// end at the next change of scan-column value.
    DegreeAdaptive { min_size: usize },
}

impl FragmentPolicy {
    pub fn nominal_size(self) -> usize {
        match self {
            FragmentPolicy::Fixed(xi) => xi,
            FragmentPolicy::DegreeAdaptive { min_size } => min_size,
        }
    }

    fn validate(self) -> Result<(), IndexError> {
        if self.nominal_size() == 0 {
            return Err(IndexError::InvalidFragmentSize);
        }
        Ok(())
    }
}

impl fmt::Display for FragmentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentPolicy::Fixed(xi) => write!(f, "fixed:{xi}"),
            FragmentPolicy::DegreeAdaptive { min_size } => write!(f, "adaptive:{min_size}"),
        }
    }
}

impl FromStr for FragmentPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, size) = s.split_once(':').unwrap_or(("fixed", s));
        let size: usize = size
            .trim()
            .parse()
            .map_err(|_| format!("invalid fragment size in {s:?}"))?;
        match kind.trim() {
            "fixed" => Ok(FragmentPolicy::Fixed(size)),
            "adaptive" => Ok(FragmentPolicy::DegreeAdaptive { min_size: size }),
            other => Err(format!("unknown fragment policy {other:?}; expected fixed or adaptive")),
        }
    }
}

impl Serialize for FragmentPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FragmentPolicy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct Fragment {
    pub id: usize,
    pub range: Range<usize>,
    pub synopsis: BloomFilter,
    /// Distinct scan-column codes in the range.
    pub distinct: usize,
}

#[derive(Clone, Debug)]
enum TransitionSet {
    Sparse(Vec<u32>),
    Dense(Bitset),
}

impl TransitionSet {
    fn new(sorted: Vec<u32>, fragment_count: usize) -> Self {
        let dense_bytes = fragment_count.div_ceil(64) * 8;
        if sorted.len() * 4 > dense_bytes {
            let mut bits = Bitset::new(fragment_count);
            for &f in &sorted {
                bits.insert(f as usize);
            }
            TransitionSet::Dense(bits)
        } else {
            TransitionSet::Sparse(sorted)
        }
    }

    fn len(&self) -> usize {
        match self {
            TransitionSet::Sparse(v) => v.len(),
            TransitionSet::Dense(b) => b.count_ones(),
        }
    }

    fn byte_size(&self) -> usize {
        match self {
            TransitionSet::Sparse(v) => v.len() * 4,
            TransitionSet::Dense(b) => b.byte_size(),
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            TransitionSet::Sparse(v) => Box::new(v.iter().map(|&f| f as usize)),
            TransitionSet::Dense(b) => Box::new(b.iter_ones()),
        }
    }
}

/// Fragments of the scan column with bloom-filter synopses, plus the directed
/// transitions `F_a → F_b` that exist iff an edge in `F_a` leads to a vertex
/// that appears in the scan column of `F_b`.
#[derive(Clone, Debug)]
pub struct TransitionGraphIndex {
    direction: Direction,
    policy: FragmentPolicy,
    false_positive_rate: f64,
    edge_count: usize,
    edge_column_bytes: usize,
    fragments: Vec<Fragment>,
    transitions: Vec<TransitionSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TgiReport {
    pub fragment_count: usize,
    pub size_policy: FragmentPolicy,
    pub p: f64,
    pub total_synopsis_bytes: usize,
    pub total_transition_count: usize,
    pub total_bytes: usize,
    pub bytes_ratio_vs_edge_columns: f64,
}

fn fragment_ranges(scan: &[VertexCode], policy: FragmentPolicy) -> Vec<Range<usize>> {
    let len = scan.len();
    match policy {
        FragmentPolicy::Fixed(xi) => (0..len).step_by(xi).map(|s| s..(s + xi).min(len)).collect(),
        FragmentPolicy::DegreeAdaptive { min_size } => {
            let mut ranges = Vec::new();
            let mut start = 0;
            for pos in 1..len {
                if pos - start >= min_size && scan[pos] != scan[pos - 1] {
                    ranges.push(start..pos);
                    start = pos;
                }
            }
            if start < len {
                ranges.push(start..len);
            }
            ranges
        }
    }
}

impl TransitionGraphIndex {
    pub fn build(
        g: &EdgeColumnGroup,
        direction: Direction,
        policy: FragmentPolicy,
        p: f64,
    ) -> Result<Self, IndexError> {
        policy.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(IndexError::InvalidFalsePositiveRate(p));
        }
        if matches!(policy, FragmentPolicy::DegreeAdaptive { .. }) && g.layout() != EdgeLayout::TypeThenEdgeClustered {
            return Err(IndexError::NotEdgeClustered);
        }
        let h = g.handles(direction);
        let n = g.vertex_dictionary().len();
        let ranges = fragment_ranges(h.scan, policy);
        let fragment_count = ranges.len();

        // Distinct scan codes per fragment, and the inverse lists of
        // fragments per code in CSR form.
        let mut stamp = vec![u32::MAX; n.max(fragment_count)];
        let mut distinct_codes: Vec<Vec<VertexCode>> = Vec::with_capacity(fragment_count);
        let mut offsets = vec![0usize; n + 1];
        for (f, range) in ranges.iter().enumerate() {
            let mut codes = Vec::new();
            for &v in &h.scan[range.clone()] {
                if stamp[v as usize] != f as u32 {
                    stamp[v as usize] = f as u32;
                    codes.push(v);
                    offsets[v as usize + 1] += 1;
                }
            }
            distinct_codes.push(codes);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut fragments_of = vec![0u32; offsets[n]];
        for (f, codes) in distinct_codes.iter().enumerate() {
            for &v in codes {
                fragments_of[fill[v as usize]] = f as u32;
                fill[v as usize] += 1;
            }
        }

        let fragments: Vec<Fragment> = ranges
            .iter()
            .zip(&distinct_codes)
            .enumerate()
            .map(|(id, (range, codes))| Fragment {
                id,
                range: range.clone(),
                synopsis: BloomFilter::from_keys(codes.iter().copied(), codes.len(), p),
                distinct: codes.len(),
            })
            .collect();

        stamp.iter_mut().for_each(|s| *s = u32::MAX);
        let transitions = ranges
            .iter()
            .enumerate()
            .map(|(a, range)| {
                let mut out = Vec::new();
                for &v in &h.fetch[range.clone()] {
                    let v = v as usize;
                    for &b in &fragments_of[offsets[v]..offsets[v + 1]] {
                        if stamp[b as usize] != a as u32 {
                            stamp[b as usize] = a as u32;
                            out.push(b);
                        }
                    }
                }
                out.sort_unstable();
                TransitionSet::new(out, fragment_count)
            })
            .collect();

        Ok(Self {
            direction,
            policy,
            false_positive_rate: p,
            edge_count: g.len(),
            edge_column_bytes: g.edge_column_bytes(),
            fragments,
            transitions,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn policy(&self) -> FragmentPolicy {
        self.policy
    }

    pub fn false_positive_rate(&self) -> f64 {
        self.false_positive_rate
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn fragment_count(&self) -> usize {
        self.fragments.len()
    }

    /// Successors of fragment `id`, ascending.
    pub fn transitions_from(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.transitions[id].iter()
    }

    pub fn has_transition(&self, from: usize, to: usize) -> bool {
        match &self.transitions[from] {
            TransitionSet::Sparse(v) => v.binary_search(&(to as u32)).is_ok(),
            TransitionSet::Dense(b) => b.contains(to),
        }
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(TransitionSet::len).sum()
    }

    /// Every transition as `(from, to)`, ascending.
    pub fn transition_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.fragments.len())
            .flat_map(|a| self.transitions_from(a).map(move |b| (a, b)))
            .collect()
    }

    pub fn synopsis_bytes(&self) -> usize {
        self.fragments.iter().map(|f| f.synopsis.byte_size()).sum()
    }

    pub fn byte_size(&self) -> usize {
        self.synopsis_bytes()
            + self.fragments.len() * FRAGMENT_DESCRIPTOR_BYTES
            + self.transitions.iter().map(TransitionSet::byte_size).sum::<usize>()
    }

    /// Mean records per fragment.
    pub fn mean_fragment_size(&self) -> f64 {
        if self.fragments.is_empty() {
            0.0
        } else {
            self.edge_count as f64 / self.fragments.len() as f64
        }
    }

    pub fn report(&self) -> TgiReport {
        let total_bytes = self.byte_size();
        TgiReport {
            fragment_count: self.fragments.len(),
            size_policy: self.policy,
            p: self.false_positive_rate,
            total_synopsis_bytes: self.synopsis_bytes(),
            total_transition_count: self.transition_count(),
            total_bytes,
            bytes_ratio_vs_edge_columns: if self.edge_column_bytes == 0 {
                0.0
            } else {
                total_bytes as f64 / self.edge_column_bytes as f64
            },
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::storage::{build_graph_from_edges, EdgeRecord, PropertyGraph};

    /// Four fragments of four edges each; `13 ⇝ 12 ⇝ 15` crosses from the
    /// second fragment into the fourth.
    pub(crate) fn fragment_fixture() -> PropertyGraph {
        let edges = [
            ("10", "11"),
            ("10", "20"),
            ("11", "10"),
            ("11", "20"),
            ("13", "12"),
            ("14", "13"),
            ("14", "16"),
            ("14", "19"),
            ("15", "17"),
            ("16", "18"),
            ("16", "12"),
            ("16", "19"),
            ("12", "15"),
            ("12", "17"),
            ("15", "18"),
            ("15", "19"),
        ];
        let records: Vec<_> = edges.iter().map(|&(s, t)| EdgeRecord::new(s, t)).collect();
        build_graph_from_edges(&records).unwrap()
    }

    #[test]
    fn fixture_transitions_and_synopses() {
        let g = fragment_fixture();
        let tgi = TransitionGraphIndex::build(&g.edges, Direction::Forward, FragmentPolicy::Fixed(4), 0.01).unwrap();
        assert_eq!(tgi.fragment_count(), 4);
        assert!(tgi.has_transition(1, 3));
        let code = |s: &str| g.vertex_dictionary().encode(s).unwrap();
        assert!(tgi.fragments()[1].synopsis.contains(code("13")));
        assert!(tgi.fragments()[1].synopsis.contains(code("14")));
        assert_eq!(tgi.fragments()[1].distinct, 2);
        // F2 targets 12, 13, 16, 19: sources in F4, F2 and F3.
        assert_eq!(tgi.transitions_from(1).collect::<Vec<_>>(), [1, 2, 3]);
        // F1 targets only 10, 11, 20: all inside F1 or sinks.
        assert_eq!(tgi.transitions_from(0).collect::<Vec<_>>(), [0]);
    }

    #[test]
    fn single_fragment_self_loop() {
        let g = fragment_fixture();
        let tgi = TransitionGraphIndex::build(&g.edges, Direction::Forward, FragmentPolicy::Fixed(1000), 0.01).unwrap();
        assert_eq!(tgi.fragment_count(), 1);
        assert_eq!(tgi.transition_pairs(), [(0, 0)]);
        let sinks = build_graph_from_edges(&[EdgeRecord::new("a", "b"), EdgeRecord::new("c", "d")]).unwrap();
        let tgi = TransitionGraphIndex::build(&sinks.edges, Direction::Forward, FragmentPolicy::Fixed(8), 0.01).unwrap();
        assert_eq!(tgi.transition_count(), 0);
    }

    #[test]
    fn empty_graph() {
        let g = build_graph_from_edges(&[]).unwrap();
        let tgi = TransitionGraphIndex::build(&g.edges, Direction::Forward, FragmentPolicy::Fixed(8), 0.01).unwrap();
        assert_eq!(tgi.fragment_count(), 0);
        assert_eq!(tgi.byte_size(), 0);
        assert_eq!(tgi.report().bytes_ratio_vs_edge_columns, 0.0);
    }

    #[test]
    fn adaptive_policy_requires_edge_clustering() {
        let g = crate::storage::tests::fixture();
        let policy = FragmentPolicy::DegreeAdaptive { min_size: 2 };
        assert!(matches!(
            TransitionGraphIndex::build(&g.edges, Direction::Forward, policy, 0.01),
            Err(IndexError::NotEdgeClustered)
        ));
        let clustered = g.edge_clustered().unwrap();
        let tgi = TransitionGraphIndex::build(&clustered.edges, Direction::Forward, policy, 0.01).unwrap();
        // Clustered sources are A A A D C D.
        let ranges: Vec<_> = tgi.fragments().iter().map(|f| f.range.clone()).collect();
        assert_eq!(ranges, [0..3, 3..5, 5..6]);
    }

    #[test]
    fn adaptive_cuts_between_groups() {
        let scan = [0, 0, 0, 1, 2, 2, 2, 2, 3, 4];
        let ranges = fragment_ranges(&scan, FragmentPolicy::DegreeAdaptive { min_size: 2 });
        assert_eq!(ranges, [0..3, 3..8, 8..10]);
        let ranges = fragment_ranges(&scan, FragmentPolicy::DegreeAdaptive { min_size: 4 });
        assert_eq!(ranges, [0..4, 4..8, 8..10]);
        for r in &ranges[..ranges.len() - 1] {
            assert!(r.len() >= 4);
        }
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("64".parse::<FragmentPolicy>().unwrap(), FragmentPolicy::Fixed(64));
        assert_eq!("fixed:8".parse::<FragmentPolicy>().unwrap(), FragmentPolicy::Fixed(8));
        assert_eq!(
            "adaptive:128".parse::<FragmentPolicy>().unwrap(),
            FragmentPolicy::DegreeAdaptive { min_size: 128 }
        );
        assert!("wide:3".parse::<FragmentPolicy>().is_err());
        let g = fragment_fixture();
        assert!(matches!(
            TransitionGraphIndex::build(&g.edges, Direction::Forward, FragmentPolicy::Fixed(0), 0.01),
            Err(IndexError::InvalidFragmentSize)
        ));
        assert!(TransitionGraphIndex::build(&g.edges, Direction::Forward, FragmentPolicy::Fixed(4), 1.0).is_err());
    }

    #[test]
    fn transition_set_representation_switch() {
        let sparse = TransitionSet::new(vec![1, 5], 1000);
        assert!(matches!(sparse, TransitionSet::Sparse(_)));
        let dense = TransitionSet::new((0..40).collect(), 64);
        assert!(matches!(dense, TransitionSet::Dense(_)));
        assert_eq!(dense.len(), 40);
        assert_eq!(dense.byte_size(), 8);
        assert_eq!(dense.iter().count(), 40);
    }
}
