//! Columnar property-graph storage.
//!
//! A graph lives in two column groups. The vertex group holds the mandatory
//! identifier plus optional attribute columns; the edge group holds the
//! source and target code columns (`V_s`, `V_t`) and optional attribute
//! columns such as `type`. Source and target share one vertex dictionary, so
//! a code names the same vertex in both columns and traversal can run on
//! codes alone.

mod cluster;
mod column;
mod dictionary;
mod stats;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cluster::{cluster_by_edge, cluster_by_type};
pub use column::Column;
pub use dictionary::Dictionary;
pub use stats::{compute_stats, GraphStats, DEFAULT_STATS_SAMPLE};

/// Dense vertex code from the shared vertex dictionary.
pub type VertexCode = u32;

/// Name of the edge attribute used by type clustering.
pub const TYPE_ATTRIBUTE: &str = "type";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StorageError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge {position} references unknown vertex {id:?}")]
    UnknownEndpoint { position: usize, id: String },
    #[error("edge group has no {TYPE_ATTRIBUTE:?} attribute column")]
    MissingTypeColumn,
    #[error("{TYPE_ATTRIBUTE:?} column has {0} null entries")]
    NullTypes(usize),
    #[error("edge clustering requires a type-clustered group; run type clustering first")]
    NotTypeClustered,
    #[error("column {name:?} has {actual} records, expected {expected}")]
    LengthMismatch {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("code {code} in column {name:?} is outside the vertex dictionary")]
    CodeOutOfRange { name: String, code: u32 },
}

/// Traversal direction; backward swaps the roles of the source and target columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Direction::Forward => 0,
            Direction::Backward => 1,
        }
    }
}

/// The column probed for working-set members and the column neighbours are
/// read from.
#[derive(Clone, Copy, Debug)]
pub struct ColumnHandles<'a> {
    pub scan: &'a [VertexCode],
    pub fetch: &'a [VertexCode],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLayout {
    Unclustered,
    TypeClustered,
    TypeThenEdgeClustered,
}

/// Input row for a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRecord {
    pub id: String,
    pub attributes: Vec<(String, String)>,
}

impl VertexRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            attributes: Vec::new(),
        }
    }
}

/// Input row for an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    pub attributes: Vec<(String, String)>,
}

impl EdgeRecord {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            attributes: Vec::new(),
        }
    }

    pub fn typed(source: impl Into<String>, target: impl Into<String>, ty: impl Into<String>) -> Self {
        Self::new(source, target).with(TYPE_ATTRIBUTE, ty)
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.push((key.into(), value.into()));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexColumnGroup {
    ids: Arc<Dictionary>,
    id_codes: Vec<VertexCode>,
    attributes: BTreeMap<String, Column>,
}

impl VertexColumnGroup {
    pub fn len(&self) -> usize {
        self.id_codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_codes.is_empty()
    }

    pub fn dictionary(&self) -> &Arc<Dictionary> {
        &self.ids
    }

    /// Identifier codes in record order.
    pub fn id_codes(&self) -> &[VertexCode] {
        &self.id_codes
    }

    pub fn attribute(&self, name: &str) -> Option<&Column> {
        self.attributes.get(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColumnGroup {
    vertices: Arc<Dictionary>,
    source: Vec<VertexCode>,
    target: Vec<VertexCode>,
    attributes: BTreeMap<String, Column>,
    layout: EdgeLayout,
    type_ranges: Option<BTreeMap<u32, Range<usize>>>,
}

impl EdgeColumnGroup {
    /// Assembles an unclustered edge group from already-encoded columns.
    pub fn from_codes(
        vertices: Arc<Dictionary>,
        source: Vec<VertexCode>,
        target: Vec<VertexCode>,
        attributes: BTreeMap<String, Column>,
    ) -> Result<Self, StorageError> {
        let expected = source.len();
        if target.len() != expected {
            return Err(StorageError::LengthMismatch {
                name: "target".into(),
                expected,
                actual: target.len(),
            });
        }
        for (name, column) in [("source", &source), ("target", &target)] {
            if let Some(&code) = column.iter().find(|&&c| c as usize >= vertices.len()) {
                return Err(StorageError::CodeOutOfRange {
                    name: name.into(),
                    code,
                });
            }
        }
        for (name, column) in &attributes {
            if column.len() != expected {
                return Err(StorageError::LengthMismatch {
                    name: name.clone(),
                    expected,
                    actual: column.len(),
                });
            }
        }
        Ok(Self {
            vertices,
            source,
            target,
            attributes,
            layout: EdgeLayout::Unclustered,
            type_ranges: None,
        })
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn vertex_dictionary(&self) -> &Arc<Dictionary> {
        &self.vertices
    }

    pub fn source(&self) -> &[VertexCode] {
        &self.source
    }

    pub fn target(&self) -> &[VertexCode] {
        &self.target
    }

    /// Column handles for a traversal direction; backward swaps the columns.
    pub fn handles(&self, direction: Direction) -> ColumnHandles<'_> {
        match direction {
            Direction::Forward => ColumnHandles {
                scan: &self.source,
                fetch: &self.target,
            },
            Direction::Backward => ColumnHandles {
                scan: &self.target,
                fetch: &self.source,
            },
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&Column> {
        self.attributes.get(name)
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.keys().map(String::as_str)
    }

    pub fn layout(&self) -> EdgeLayout {
        self.layout
    }

    pub fn type_ranges(&self) -> Option<&BTreeMap<u32, Range<usize>>> {
        self.type_ranges.as_ref()
    }

    /// Bytes of the two vertex code columns at 4 bytes per code.
    pub fn edge_column_bytes(&self) -> usize {
        2 * self.len() * std::mem::size_of::<VertexCode>()
    }

    /// Decoded record at `pos`: source id, target id and the non-null attributes.
    pub fn record(&self, pos: usize) -> (String, String, BTreeMap<String, String>) {
        let decode = |c: VertexCode| self.vertices.decode(c).unwrap_or_default().to_string();
        let attrs = self
            .attributes
            .iter()
            .filter_map(|(k, col)| col.value(pos).map(|v| (k.clone(), v.to_string())))
            .collect();
        (decode(self.source[pos]), decode(self.target[pos]), attrs)
    }

    pub(crate) fn permuted(&self, order: &[usize]) -> Self {
        Self {
            vertices: Arc::clone(&self.vertices),
            source: order.iter().map(|&i| self.source[i]).collect(),
            target: order.iter().map(|&i| self.target[i]).collect(),
            attributes: self
                .attributes
                .iter()
                .map(|(k, c)| (k.clone(), c.permuted(order)))
                .collect(),
            layout: self.layout,
            type_ranges: self.type_ranges.clone(),
        }
    }
}

/// Both column groups of one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyGraph {
    pub vertices: VertexColumnGroup,
    pub edges: EdgeColumnGroup,
}

impl PropertyGraph {
    pub fn vertex_dictionary(&self) -> &Arc<Dictionary> {
        self.vertices.dictionary()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Same vertices, different edge layout.
    pub fn with_edges(&self, edges: EdgeColumnGroup) -> Self {
        debug_assert!(Arc::ptr_eq(self.vertex_dictionary(), edges.vertex_dictionary()));
        Self {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// Convenience for applying type then edge clustering.
    pub fn edge_clustered(&self) -> Result<Self, StorageError> {
        let typed = cluster_by_type(&self.edges)?;
        Ok(self.with_edges(cluster_by_edge(&typed)?))
    }
}

fn attribute_columns<'a, R, F>(rows: &'a [R], attrs: F) -> BTreeMap<String, Column>
where
    F: Fn(&'a R) -> &'a [(String, String)],
{
    let names: BTreeSet<&str> = rows
        .iter()
        .flat_map(|r| attrs(r).iter().map(|(k, _)| k.as_str()))
        .collect();
    names
        .into_iter()
        .map(|name| {
            let column = Column::from_values(rows.iter().map(|r| {
                attrs(r)
                    .iter()
                    .find(|(k, _)| k == name)
                    .map(|(_, v)| v.as_str())
            }));
            (name.to_string(), column)
        })
        .collect()
}

/// Builds both column groups in input order (unclustered layout).
pub fn build_graph(
    vertices: &[VertexRecord],
    edges: &[EdgeRecord],
) -> Result<PropertyGraph, StorageError> {
    let mut seen = HashSet::with_capacity(vertices.len());
    for v in vertices {
        if !seen.insert(v.id.as_str()) {
            return Err(StorageError::DuplicateVertex(v.id.clone()));
        }
    }
    let dictionary = Arc::new(Dictionary::from_values(vertices.iter().map(|v| v.id.as_str())));
    let encoder = dictionary.encoder();
    let id_codes = vertices.iter().map(|v| encoder[v.id.as_str()]).collect();

    let mut source = Vec::with_capacity(edges.len());
    let mut target = Vec::with_capacity(edges.len());
    for (position, e) in edges.iter().enumerate() {
        for (id, column) in [(&e.source, &mut source), (&e.target, &mut target)] {
            match encoder.get(id.as_str()) {
                Some(&code) => column.push(code),
                None => {
                    return Err(StorageError::UnknownEndpoint {
                        position,
                        id: id.clone(),
                    })
                }
            }
        }
    }
    drop(encoder);

    let vertex_group = VertexColumnGroup {
        ids: Arc::clone(&dictionary),
        id_codes,
        attributes: attribute_columns(vertices, |v| &v.attributes),
    };
    let edge_group = EdgeColumnGroup::from_codes(
        dictionary,
        source,
        target,
        attribute_columns(edges, |e| &e.attributes),
    )?;
    Ok(PropertyGraph {
        vertices: vertex_group,
        edges: edge_group,
    })
}

/// Builds a graph whose vertex set is implied by the edge endpoints, in
/// first-appearance order.
pub fn build_graph_from_edges(edges: &[EdgeRecord]) -> Result<PropertyGraph, StorageError> {
    let mut seen = HashSet::new();
    let vertices: Vec<VertexRecord> = edges
        .iter()
        .flat_map(|e| [e.source.as_str(), e.target.as_str()])
        .filter(|id| seen.insert(*id))
        .map(VertexRecord::new)
        .collect();
    build_graph(&vertices, edges)
}

/// Builds a graph from a vertex id list and already-numbered edges
/// (`(source_index, target_index)` into `ids`), skipping per-record strings.
pub fn build_graph_indexed(
    ids: &[String],
    edges: &[(usize, usize)],
    edge_attributes: BTreeMap<String, Column>,
) -> Result<PropertyGraph, StorageError> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(StorageError::DuplicateVertex(id.clone()));
        }
    }
    let dictionary = Arc::new(Dictionary::from_values(ids.iter().map(String::as_str)));
    let encoder = dictionary.encoder();
    let id_codes: Vec<VertexCode> = ids.iter().map(|id| encoder[id.as_str()]).collect();
    drop(encoder);
    let code_of = |position: usize, index: usize| {
        id_codes
            .get(index)
            .copied()
            .ok_or_else(|| StorageError::UnknownEndpoint {
                position,
                id: format!("#{index}"),
            })
    };
    let mut source = Vec::with_capacity(edges.len());
    let mut target = Vec::with_capacity(edges.len());
    for (position, &(s, t)) in edges.iter().enumerate() {
        source.push(code_of(position, s)?);
        target.push(code_of(position, t)?);
    }
    let edges = EdgeColumnGroup::from_codes(Arc::clone(&dictionary), source, target, edge_attributes)?;
    Ok(PropertyGraph {
        vertices: VertexColumnGroup {
            ids: dictionary,
            id_codes,
            attributes: BTreeMap::new(),
        },
        edges,
    })
}
