//! Plain-text graph and factorization files.
//!
//! Graph file: a header line `n m k`, then `m` lines `u v` with 0-based
//! vertices. Factorization file: `m` lines `edgeId treeIndex`. In both, lines
//! starting with `#` are comments and blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Factorization, MultiGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: MultiGraph,
    pub k: usize,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields<const N: usize>(line: usize, s: &str) -> Result<[usize; N]> {
    let mut out = [0usize; N];
    let mut parts = s.split_whitespace();
    for slot in out.iter_mut() {
        let tok = parts.next().ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected {N} fields"),
        })?;
        *slot = tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("not a non-negative integer: {tok:?}"),
        })?;
    }
    if parts.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: format!("expected {N} fields"),
        });
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `n m k` header".into(),
    })?;
    let [n, m, k] = parse_fields::<3>(hline, header)?;
    let mut edges = Vec::with_capacity(m);
    let mut last_line = hline;
    for (line, s) in lines {
        let [u, v] = parse_fields::<2>(line, s)?;
        edges.push((u, v));
        last_line = line;
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: last_line,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    let graph = MultiGraph::new(n, edges)?;
    Ok(GraphFile { graph, k })
}

pub fn write_graph(g: &MultiGraph, k: usize) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", g.vertex_count(), g.edge_count(), k).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn parse_factorization(text: &str, m: usize, k: usize) -> Result<Factorization> {
    let mut assignment = vec![None; m];
    for (line, s) in content_lines(text) {
        let [e, t] = parse_fields::<2>(line, s)?;
        if e >= m {
            return Err(Error::Parse {
                line,
                msg: format!("edge id {e} out of range (m = {m})"),
            });
        }
        if assignment[e].replace(t).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("edge id {e} listed twice"),
            });
        }
    }
    let assignment = assignment
        .into_iter()
        .enumerate()
        .map(|(e, t)| {
            t.ok_or(Error::Parse {
                line: 0,
                msg: format!("edge id {e} missing"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Factorization::new(k, assignment))
}

pub fn write_factorization(f: &Factorization) -> String {
    let mut out = String::new();
    for (e, t) in f.assignment.iter().enumerate() {
        writeln!(out, "{e} {t}").unwrap();
    }
    out
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn read_factorization_file(path: &Path, m: usize, k: usize) -> Result<Factorization> {
    parse_factorization(&std::fs::read_to_string(path)?, m, k)
}

/// Writes `g` under `dir` with a name derived from its edges. Failures are
/// swallowed: persistence is a debugging aid, never a reason to fail.
pub(crate) fn persist_instance(
    dir: Option<&Path>,
    prefix: &str,
    g: &MultiGraph,
    k: usize,
) -> Option<std::path::PathBuf> {
    use std::hash::{Hash, Hasher};
    let dir = dir?;
    let mut h = std::collections::hash_map::DefaultHasher::new();
    g.edges().hash(&mut h);
    g.vertex_count().hash(&mut h);
    k.hash(&mut h);
    let path = dir.join(format!("{prefix}-{:016x}.txt", h.finish()));
    std::fs::create_dir_all(dir).ok()?;
    std::fs::write(&path, write_graph(g, k)).ok()?;
    Some(path)
}
