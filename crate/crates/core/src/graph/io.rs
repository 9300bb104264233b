use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Directedness, Graph, IngestReport, NodeId, Vocabulary};

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub vocab: Vocabulary,
    pub report: IngestReport,
}

/// Reads `src<TAB>dst` lines. `#` lines and blank lines are skipped.
///
/// Labels are resolved through `vocab`; when `extend` is false an unknown
/// label is a parse error. Returns the raw pairs in file order.
pub fn parse_edge_list<R: BufRead>(
    reader: R,
    path: &Path,
    vocab: &mut Vocabulary,
    extend: bool,
) -> Result<Vec<(NodeId, NodeId)>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (src, dst) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(d), None) if !s.is_empty() && !d.is_empty() => (s, d),
            _ => return Err(Error::parse(path, lineno, format!("expected `src<TAB>dst`, got {line:?}"))),
        };
        let mut resolve = |label: &str| -> Result<NodeId> {
            if extend {
                Ok(vocab.get_or_insert(label))
            } else {
                vocab
                    .id(label)
                    .ok_or_else(|| Error::parse(path, lineno, format!("unknown node {label:?}")))
            }
        };
        let a = resolve(src)?;
        let b = resolve(dst)?;
        pairs.push((a, b));
    }
    Ok(pairs)
}

/// Loads an edge list, assigning dense ids in first-appearance order.
pub fn load_edge_list(path: &Path, directedness: Directedness) -> Result<LoadedGraph> {
    let file = File::open(path)?;
    let mut vocab = Vocabulary::new();
    let pairs = parse_edge_list(BufReader::new(file), path, &mut vocab, true)?;
    if pairs.is_empty() {
        return Err(Error::EmptyInput(path.to_owned()));
    }
    let (graph, report) = Graph::from_edges(vocab.len(), directedness, pairs)?;
    if report.self_loops > 0 || report.duplicates > 0 {
        log::info!(
            "{}: dropped {} self-loops and {} duplicate edges",
            path.display(),
            report.self_loops,
            report.duplicates
        );
    }
    Ok(LoadedGraph { graph, vocab, report })
}

/// Writes one `src<TAB>dst` line per edge using vocabulary labels, preceded
/// by an optional `#` comment header.
pub fn write_edge_list<W: Write>(
    mut w: W,
    edges: &[(NodeId, NodeId)],
    vocab: &Vocabulary,
    header: Option<&str>,
) -> Result<()> {
    if let Some(h) = header {
        writeln!(w, "# {h}")?;
    }
    for &(a, b) in edges {
        let (la, lb) = match (vocab.label(a), vocab.label(b)) {
            (Some(la), Some(lb)) => (la, lb),
            _ => {
                return Err(Error::NodeOutOfRange {
                    node: a.max(b),
                    num_nodes: vocab.len(),
                })
            }
        };
        writeln!(w, "{la}\t{lb}")?;
    }
    Ok(())
}
