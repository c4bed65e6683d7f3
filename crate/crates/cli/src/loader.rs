//! Tab-separated graph files.
//!
//! Edge lines are `source <TAB> target <TAB> type [<TAB> key=value]*`; the
//! optional vertex file has `id [<TAB> key=value]*`. Blank lines and lines
//! starting with `#` are skipped.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use colgraph::{build_graph, build_graph_from_edges, EdgeColumnGroup, EdgeRecord, PropertyGraph, StorageError, VertexRecord};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Storage(#[from] StorageError),
}

fn parse_error(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        message: message.into(),
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_attributes<'a>(line: usize, fields: impl Iterator<Item = &'a str>) -> Result<Vec<(String, String)>, LoadError> {
    fields
        .map(|f| match f.split_once('=') {
            Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
            _ => Err(parse_error(line, format!("expected key=value, found {f:?}"))),
        })
        .collect()
}

/// Edge records with the line each came from.
pub fn parse_edges(text: &str) -> Result<Vec<(usize, EdgeRecord)>, LoadError> {
    data_lines(text)
        .map(|(line, l)| {
            let mut fields = l.split('\t');
            let mut next = |what: &str| match fields.next() {
                Some(f) if !f.is_empty() => Ok(f),
                _ => Err(parse_error(line, format!("missing {what}"))),
            };
            let source = next("source id")?;
            let target = next("target id")?;
            let ty = next("edge type")?;
            let mut record = EdgeRecord::typed(source, target, ty);
            record.attributes.extend(parse_attributes(line, fields)?);
            Ok((line, record))
        })
        .collect()
}

pub fn parse_vertices(text: &str) -> Result<Vec<(usize, VertexRecord)>, LoadError> {
    data_lines(text)
        .map(|(line, l)| {
            let mut fields = l.split('\t');
            let id = fields.next().filter(|f| !f.is_empty()).ok_or_else(|| parse_error(line, "missing vertex id"))?;
            let mut record = VertexRecord::new(id);
            record.attributes = parse_attributes(line, fields)?;
            Ok((line, record))
        })
        .collect()
}

/// Builds a graph from file contents; endpoint and duplicate errors cite the
/// offending line.
pub fn load_str(edges: &str, vertices: Option<&str>) -> Result<PropertyGraph, LoadError> {
    let (edge_lines, edge_records): (Vec<usize>, Vec<EdgeRecord>) = parse_edges(edges)?.into_iter().unzip();
    let Some(vertices) = vertices else {
        return Ok(build_graph_from_edges(&edge_records)?);
    };
    let (vertex_lines, vertex_records): (Vec<usize>, Vec<VertexRecord>) = parse_vertices(vertices)?.into_iter().unzip();
    build_graph(&vertex_records, &edge_records).map_err(|e| match e {
        StorageError::UnknownEndpoint { position, id } => {
            parse_error(edge_lines[position], format!("edge endpoint {id:?} is not in the vertex file"))
        }
        StorageError::DuplicateVertex(id) => {
            let line = vertex_records
                .iter()
                .zip(&vertex_lines)
                .filter(|(v, _)| v.id == id)
                .nth(1)
                .map_or(0, |(_, &l)| l);
            parse_error(line, format!("duplicate vertex id {id:?}"))
        }
        other => other.into(),
    })
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(edges: &Path, vertices: Option<&Path>) -> Result<PropertyGraph, LoadError> {
    let edge_text = read(edges)?;
    let vertex_text = vertices.map(read).transpose()?;
    load_str(&edge_text, vertex_text.as_deref())
}

/// Writes the edge group in record order; `type` leads the attributes.
pub fn write_edges<W: Write>(g: &EdgeColumnGroup, mut out: W) -> io::Result<()> {
    for pos in 0..g.len() {
        let (source, target, mut attrs) = g.record(pos);
        let ty = attrs.remove(colgraph::storage::TYPE_ATTRIBUTE).ok_or_else(|| {
            io::Error::new(io::ErrorKind::InvalidData, format!("edge {pos} has no type"))
        })?;
        write!(out, "{source}\t{target}\t{ty}")?;
        for (k, v) in attrs {
            write!(out, "\t{k}={v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIXTURE: &str = "# worked example\nA\tB\ta\nA\tC\ta\nA\tD\ta\nD\tF\ta\nD\tC\tb\nC\tE\tb\n";

    #[test]
    fn fixture_counts() {
        let g = load_str(FIXTURE, None).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 6));
    }

    #[test]
    fn empty_input() {
        let g = load_str("", None).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (0, 0));
        let g = load_str("# nothing\n\n", None).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn malformed_line_cites_line_number() {
        let err = load_str("A\tB\ta\nB\tC\ta\nC\tD\n", None).unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 3, .. }), "{err}");
        let err = load_str("A\tB\ta\tweight\n", None).unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 1, .. }));
        assert!(err.to_string().starts_with("line 1:"));
    }

    #[test]
    fn attributes_and_vertex_file() {
        let g = load_str("A\tB\tknows\tsince=2001\tw=3\n", Some("A\tage=3\nB\nC\n")).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges.attribute("w").unwrap().value(0), Some("3"));
        assert_eq!(g.vertices.attribute("age").unwrap().value(0), Some("3"));

        let err = load_str("A\tB\tx\nA\tZ\tx\n", Some("A\nB\n")).unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 2, .. }), "{err}");
        let err = load_str("A\tB\tx\n", Some("A\nB\n# c\nA\n")).unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn write_then_read_roundtrip() {
        let g = load_str("A\tB\tknows\tw=1\nB\tC\tlikes\n", None).unwrap();
        let mut buf = Vec::new();
        write_edges(&g.edges, &mut buf).unwrap();
        let again = load_str(std::str::from_utf8(&buf).unwrap(), None).unwrap();
        let records = |g: &PropertyGraph| (0..g.edge_count()).map(|i| g.edges.record(i)).collect::<Vec<_>>();
        assert_eq!(records(&again), records(&g));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load(Path::new("/nonexistent/edges.tsv"), None), Err(LoadError::Io { .. })));
    }
}
