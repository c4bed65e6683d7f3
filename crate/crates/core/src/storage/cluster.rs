//! Physical reorganization of the edge column group.
//!
//! Type clustering groups records by edge type so a type-restricted query
//! touches only its subgraph's range. Edge clustering then groups each type
//! range by source code so all out-edges of a vertex are contiguous.

use std::collections::BTreeMap;
use std::ops::Range;

use super::{EdgeColumnGroup, EdgeLayout, StorageError, TYPE_ATTRIBUTE};

pub fn cluster_by_type(g: &EdgeColumnGroup) -> Result<EdgeColumnGroup, StorageError> {
    if g.is_empty() && g.attribute(TYPE_ATTRIBUTE).is_none() {
        let mut out = g.clone();
        out.layout = EdgeLayout::TypeClustered;
        out.type_ranges = Some(BTreeMap::new());
        return Ok(out);
    }
    let types = g.attribute(TYPE_ATTRIBUTE).ok_or(StorageError::MissingTypeColumn)?;
    let nulls = types.null_count();
    if nulls > 0 {
        return Err(StorageError::NullTypes(nulls));
    }
    if g.layout() == EdgeLayout::TypeThenEdgeClustered {
        return Ok(g.clone());
    }
    let codes = types.raw_codes();
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&i| codes[i]);

    let mut out = g.permuted(&order);
    let sorted = out.attribute(TYPE_ATTRIBUTE).expect("type column").raw_codes();
    let mut ranges: BTreeMap<u32, Range<usize>> = BTreeMap::new();
    for (pos, &code) in sorted.iter().enumerate() {
        ranges
            .entry(code)
            .and_modify(|r| r.end = pos + 1)
            .or_insert(pos..pos + 1);
    }
    out.layout = EdgeLayout::TypeClustered;
    out.type_ranges = Some(ranges);
    Ok(out)
}

pub fn cluster_by_edge(g: &EdgeColumnGroup) -> Result<EdgeColumnGroup, StorageError> {
    let ranges = match (g.layout(), g.type_ranges()) {
        (EdgeLayout::Unclustered, _) | (_, None) => return Err(StorageError::NotTypeClustered),
        (_, Some(ranges)) => ranges,
    };
    let mut order: Vec<usize> = Vec::with_capacity(g.len());
    for range in ranges.values() {
        let start = order.len();
        order.extend(range.clone());
        order[start..].sort_by_key(|&i| g.source[i]);
    }
    let mut out = g.permuted(&order);
    out.layout = EdgeLayout::TypeThenEdgeClustered;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::tests::fixture;
    use crate::storage::{build_graph_from_edges, EdgeRecord, PropertyGraph};
    use proptest::prelude::*;

    fn records(g: &EdgeColumnGroup) -> Vec<(String, String, BTreeMap<String, String>)> {
        (0..g.len()).map(|i| g.record(i)).collect()
    }

    fn multiset(g: &EdgeColumnGroup) -> Vec<(String, String, BTreeMap<String, String>)> {
        let mut r = records(g);
        r.sort();
        r
    }

    fn names(g: &PropertyGraph, e: &EdgeColumnGroup) -> Vec<(String, String)> {
        let _ = g;
        records(e).into_iter().map(|(s, t, _)| (s, t)).collect()
    }

    #[test]
    fn fixture_type_ranges() {
        let g = fixture();
        let typed = cluster_by_type(&g.edges).unwrap();
        let types = typed.attribute("type").unwrap();
        let a = types.dictionary().encode("a").unwrap();
        let b = types.dictionary().encode("b").unwrap();
        let ranges = typed.type_ranges().unwrap();
        assert_eq!(ranges[&a], 0..4);
        assert_eq!(ranges[&b], 4..6);
        assert_eq!(typed.layout(), EdgeLayout::TypeClustered);
        assert_eq!(multiset(&typed), multiset(&g.edges));
        // Stable: relative order of type-b records kept.
        assert_eq!(
            names(&g, &typed)[4..],
            [("D".into(), "C".into()), ("C".into(), "E".into())]
        );
    }

    #[test]
    fn fixture_edge_clustering_groups_sources() {
        let g = fixture();
        let clustered = cluster_by_edge(&cluster_by_type(&g.edges).unwrap()).unwrap();
        let pairs = names(&g, &clustered);
        assert_eq!(
            pairs[..4],
            [
                ("A".into(), "B".into()),
                ("A".into(), "C".into()),
                ("A".into(), "D".into()),
                ("D".into(), "F".into())
            ]
        );
        assert_eq!(clustered.layout(), EdgeLayout::TypeThenEdgeClustered);
        assert_eq!(multiset(&clustered), multiset(&g.edges));
    }

    #[test]
    fn edge_clustering_is_idempotent() {
        let g = fixture();
        let once = cluster_by_edge(&cluster_by_type(&g.edges).unwrap()).unwrap();
        let twice = cluster_by_edge(&once).unwrap();
        assert_eq!(once, twice);
        assert_eq!(cluster_by_type(&once).unwrap(), once);
    }

    #[test]
    fn edge_clustering_requires_type_clustering() {
        assert_eq!(
            cluster_by_edge(&fixture().edges).unwrap_err(),
            StorageError::NotTypeClustered
        );
    }

    #[test]
    fn missing_or_null_type_column() {
        let g = build_graph_from_edges(&[EdgeRecord::new("a", "b")]).unwrap();
        assert_eq!(cluster_by_type(&g.edges).unwrap_err(), StorageError::MissingTypeColumn);
        let g = build_graph_from_edges(&[
            EdgeRecord::typed("a", "b", "x"),
            EdgeRecord::new("b", "a"),
        ])
        .unwrap();
        assert_eq!(cluster_by_type(&g.edges).unwrap_err(), StorageError::NullTypes(1));
    }

    #[test]
    fn single_type_and_empty() {
        let g = build_graph_from_edges(&[
            EdgeRecord::typed("b", "a", "x"),
            EdgeRecord::typed("a", "b", "x"),
        ])
        .unwrap();
        let typed = cluster_by_type(&g.edges).unwrap();
        assert_eq!(records(&typed), records(&g.edges));
        assert_eq!(typed.type_ranges().unwrap().values().cloned().collect::<Vec<_>>(), [0..2]);

        let empty = crate::storage::build_graph(&[], &[]).unwrap();
        let mut attrs = BTreeMap::new();
        attrs.insert("type".to_string(), crate::storage::Column::from_values(std::iter::empty()));
        let e = EdgeColumnGroup::from_codes(empty.vertex_dictionary().clone(), vec![], vec![], attrs).unwrap();
        let typed = cluster_by_type(&e).unwrap();
        assert!(typed.is_empty());
        assert!(typed.type_ranges().unwrap().is_empty());
    }

    fn arb_edges() -> impl Strategy<Value = Vec<(u8, u8, u8)>> {
        proptest::collection::vec((0u8..12, 0u8..12, 0u8..3), 0..60)
    }

    proptest! {
        #[test]
        fn clustering_preserves_multiset_and_ranges(edges in arb_edges()) {
            let records: Vec<_> = edges
                .iter()
                .map(|&(s, t, ty)| EdgeRecord::typed(format!("v{s}"), format!("v{t}"), format!("t{ty}")))
                .collect();
            let g = build_graph_from_edges(&records).unwrap();
            let typed = cluster_by_type(&g.edges).unwrap();
            let clustered = cluster_by_edge(&typed).unwrap();
            prop_assert_eq!(multiset(&clustered), multiset(&g.edges));

            // Type ranges partition [0, len) and hold exactly their type.
            let ranges = clustered.type_ranges().unwrap();
            let mut next = 0;
            for (&code, r) in ranges {
                prop_assert_eq!(r.start, next);
                next = r.end;
                for pos in r.clone() {
                    prop_assert_eq!(clustered.attribute("type").unwrap().code(pos), Some(code));
                }
                // Sources sorted, hence contiguous per source.
                let src = &clustered.source()[r.clone()];
                prop_assert!(src.windows(2).all(|w| w[0] <= w[1]));
            }
            prop_assert_eq!(next, clustered.len());
        }
    }
}
