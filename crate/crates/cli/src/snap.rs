//! Loader for whitespace-separated `u v` edge lists (the SNAP layout):
//! `#` comments, duplicate orientations collapsed, self-loops dropped, and
//! arbitrary vertex ids densified to `0..n`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: expected `u v`, got `{content}`")]
    Malformed { line: usize, content: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An undirected simple graph with dense vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGraph {
    pub vertex_count: usize,
    /// Unique `u < v` pairs, sorted.
    pub edges: Vec<(u32, u32)>,
}

impl RawGraph {
    pub fn from_edge_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut ids = BTreeMap::new();
        let mut raw_edges = Vec::new();
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            ids.entry(a).or_insert(0u32);
            ids.entry(b).or_insert(0u32);
            raw_edges.push((a.min(b), a.max(b)));
        }
        for (dense, (_, slot)) in ids.iter_mut().enumerate() {
            *slot = dense as u32;
        }
        let mut edges: Vec<(u32, u32)> = raw_edges
            .into_iter()
            .map(|(a, b)| (ids[&a], ids[&b]))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        RawGraph {
            vertex_count: ids.len(),
            edges,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

pub fn load_edge_list_str(text: &str) -> Result<RawGraph, LoadError> {
    let mut pairs = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else { continue };
        let malformed = || LoadError::Malformed {
            line: idx + 1,
            content: raw_line.trim().to_string(),
        };
        let u: u64 = first.parse().map_err(|_| malformed())?;
        let v: u64 = tokens
            .next()
            .ok_or_else(malformed)?
            .parse()
            .map_err(|_| malformed())?;
        if tokens.next().is_some() {
            return Err(malformed());
        }
        pairs.push((u, v));
    }
    Ok(RawGraph::from_edge_pairs(pairs))
}

pub fn load_edge_list(path: &Path) -> Result<RawGraph, LoadError> {
    let text = fs::read_to_string(path)?;
    load_edge_list_str(&text)
}
