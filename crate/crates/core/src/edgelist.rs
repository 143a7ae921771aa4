//! Edge-list text format.
//!
//! First non-comment line is `n e`; each of the following `e` lines is a
//! directed edge `u v` (0-indexed, ASCII decimal, LF-terminated). Lines
//! starting with `#` are ignored. The parser rejects loops, duplicate edges
//! and anti-parallel pairs with the offending line number.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::graph::{GraphError, OrientedGraph, OrientedGraphBuilder};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

fn malformed(line: usize, msg: impl Into<String>) -> EdgeListError {
    EdgeListError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Parses the edge-list format from `reader`.
pub fn read_edge_list(reader: impl BufRead) -> Result<OrientedGraph, EdgeListError> {
    let mut header: Option<(usize, usize)> = None;
    let mut builder: Option<OrientedGraphBuilder> = None;
    let mut seen_edges = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(malformed(lineno, format!("expected 2 fields, got {}", fields.len())));
        }
        let a: usize = fields[0]
            .parse()
            .map_err(|_| malformed(lineno, format!("bad integer {:?}", fields[0])))?;
        let b: usize = fields[1]
            .parse()
            .map_err(|_| malformed(lineno, format!("bad integer {:?}", fields[1])))?;
        match builder {
            None => {
                header = Some((a, b));
                builder = Some(OrientedGraphBuilder::new(a));
            }
            Some(ref mut bld) => {
                if seen_edges == header.unwrap().1 {
                    return Err(malformed(lineno, "more edges than declared in header"));
                }
                bld.add_edge(a, b)
                    .map_err(|source| EdgeListError::Graph { line: lineno, source })?;
                seen_edges += 1;
            }
        }
    }

    let builder = builder.ok_or_else(|| malformed(0, "empty input: missing `n e` header"))?;
    let (_, e) = header.unwrap();
    if seen_edges != e {
        return Err(malformed(0, format!("header declares {e} edges, found {seen_edges}")));
    }
    Ok(builder.build())
}

/// Writes `g` in the edge-list format, edges sorted lexicographically.
/// `comments` are emitted first, one `# `-prefixed line each.
pub fn write_edge_list(
    g: &OrientedGraph,
    mut writer: impl Write,
    comments: &[&str],
) -> std::io::Result<()> {
    for c in comments {
        writeln!(writer, "# {c}")?;
    }
    writeln!(writer, "{} {}", g.n(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(writer, "{u} {v}")?;
    }
    Ok(())
}

/// Stable FNV-1a hash of the canonical edge-list text, as a hex string.
/// Identifies a graph in reports independent of how it was loaded.
pub fn canonical_hash(g: &OrientedGraph) -> String {
    let mut text = Vec::new();
    write_edge_list(g, &mut text, &[]).expect("write to Vec cannot fail");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    format!("{h:016x}")
}
