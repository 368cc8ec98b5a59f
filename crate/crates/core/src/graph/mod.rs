//! Directed document graphs.
//!
//! Nodes are corpus positions. Successor lists are kept sorted by node
//! position and free of self-loops and repeats, so a graph that is written to
//! disk and read back compares equal to the original.

mod random;
mod tfidf;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub use random::build_random_graph;
pub use tfidf::{build_tfidf_graph, fit_tfidf, tfidf_terms, TfIdfModel, DEFAULT_TOP_K};

/// How the edges of a graph were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeMode {
    Hyperlink,
    Tfidf,
    Random,
}

impl EdgeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeMode::Hyperlink => "hyperlink",
            EdgeMode::Tfidf => "tfidf",
            EdgeMode::Random => "random",
        }
    }
}

impl fmt::Display for EdgeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperlink" => Ok(EdgeMode::Hyperlink),
            "tfidf" => Ok(EdgeMode::Tfidf),
            "random" => Ok(EdgeMode::Random),
            other => Err(Error::Config(format!("unknown edge mode {other:?}"))),
        }
    }
}

/// Warnings gathered while building a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    /// Outlinks whose target id is not in the corpus.
    pub dangling_links: usize,
    /// Documents with an all-zero TF-IDF vector.
    pub empty_documents: usize,
    /// Out-degree actually used when the requested one was clamped.
    pub clamped_out_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentGraph {
    node_ids: Vec<String>,
    out_edges: Vec<Vec<u32>>,
    in_degree: Vec<u32>,
    mode: EdgeMode,
}

impl DocumentGraph {
    /// Builds a graph from raw successor lists, dropping self-loops and repeats.
    pub fn from_successors(node_ids: Vec<String>, mut out_edges: Vec<Vec<u32>>, mode: EdgeMode) -> Self {
        assert_eq!(node_ids.len(), out_edges.len(), "one successor list per node");
        let n = node_ids.len();
        let mut in_degree = vec![0u32; n];
        for (src, succ) in out_edges.iter_mut().enumerate() {
            succ.sort_unstable();
            succ.dedup();
            succ.retain(|&t| t as usize != src);
            for &t in succ.iter() {
                assert!((t as usize) < n, "edge target {t} out of range");
                in_degree[t as usize] += 1;
            }
        }
        DocumentGraph {
            node_ids,
            out_edges,
            in_degree,
            mode,
        }
    }

    /// A graph over the corpus with no edges at all.
    pub fn empty(corpus: &Corpus, mode: EdgeMode) -> Self {
        let ids = node_ids_of(corpus);
        let n = ids.len();
        Self::from_successors(ids, vec![Vec::new(); n], mode)
    }

    pub fn mode(&self) -> EdgeMode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn node_id(&self, node: usize) -> &str {
        &self.node_ids[node]
    }

    pub fn successors(&self, node: usize) -> &[u32] {
        &self.out_edges[node]
    }

    pub fn in_degree(&self, node: usize) -> u32 {
        self.in_degree[node]
    }

    pub fn in_degrees(&self) -> &[u32] {
        &self.in_degree
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out_edges[src].binary_search(&(dst as u32)).is_ok()
    }

    /// Edges as `(source, target)` node positions in source order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_edges
            .iter()
            .enumerate()
            .flat_map(|(s, succ)| succ.iter().map(move |&t| (s, t as usize)))
    }

    /// Writes the graph as a header line followed by `source<TAB>target`
    /// records sorted by (source id, target id).
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for id in &self.node_ids {
            if id.contains(['\t', '\n', '\r']) {
                return Err(Error::Config(format!(
                    "document id {id:?} contains a tab or newline and cannot be written as TSV"
                )));
            }
        }
        writeln!(
            out,
            "#mode={} nodes={} edges={}",
            self.mode,
            self.node_count(),
            self.edge_count()
        )?;
        let mut by_id: Vec<usize> = (0..self.node_count()).collect();
        by_id.sort_by(|&a, &b| self.node_ids[a].cmp(&self.node_ids[b]));
        for &src in &by_id {
            let mut targets: Vec<&str> = self.out_edges[src]
                .iter()
                .map(|&t| self.node_ids[t as usize].as_str())
                .collect();
            targets.sort_unstable();
            for t in targets {
                writeln!(out, "{}\t{}", self.node_ids[src], t)?;
            }
        }
        Ok(())
    }

    /// Reads a graph written by [`DocumentGraph::write_tsv`]. Node ids are
    /// resolved against `corpus`, which must be the corpus the graph was
    /// built from.
    pub fn read_tsv<R: BufRead>(reader: R, corpus: &Corpus) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::malformed(1, "missing graph header")),
        };
        let (mode, nodes, edges) = parse_header(&header).map_err(|m| Error::malformed(1, m))?;
        if nodes != corpus.len() {
            return Err(Error::malformed(
                1,
                format!("graph has {nodes} nodes but the corpus has {} documents", corpus.len()),
            ));
        }

        let mut out_edges = vec![Vec::new(); corpus.len()];
        let mut seen = 0usize;
        let mut prev: Option<(String, String)> = None;
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (src, dst) = line
                .split_once('\t')
                .ok_or_else(|| Error::malformed(line_no, "expected source<TAB>target"))?;
            let s = corpus
                .position(src)
                .ok_or_else(|| Error::malformed(line_no, format!("unknown source id {src:?}")))?;
            let t = corpus
                .position(dst)
                .ok_or_else(|| Error::malformed(line_no, format!("unknown target id {dst:?}")))?;
            if s == t {
                return Err(Error::malformed(line_no, "self-loop"));
            }
            let key = (src.to_owned(), dst.to_owned());
            if let Some(p) = &prev {
                if *p >= key {
                    return Err(Error::malformed(line_no, "records not sorted by (source, target) or repeated"));
                }
            }
            prev = Some(key);
            out_edges[s].push(t as u32);
            seen += 1;
        }
        if seen != edges {
            return Err(Error::malformed(1, format!("header declares {edges} edges, found {seen}")));
        }
        Ok(Self::from_successors(node_ids_of(corpus), out_edges, mode))
    }
}

fn parse_header(line: &str) -> Result<(EdgeMode, usize, usize), String> {
    let rest = line.strip_prefix('#').ok_or("header must start with '#'")?;
    let (mut mode, mut nodes, mut edges) = (None, None, None);
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| format!("bad header field {field:?}"))?;
        match k {
            "mode" => mode = Some(v.parse::<EdgeMode>().map_err(|e| e.to_string())?),
            "nodes" => nodes = Some(v.parse::<usize>().map_err(|e| format!("nodes: {e}"))?),
            "edges" => edges = Some(v.parse::<usize>().map_err(|e| format!("edges: {e}"))?),
            other => return Err(format!("unknown header field {other:?}")),
        }
    }
    Ok((
        mode.ok_or("header lacks mode")?,
        nodes.ok_or("header lacks nodes")?,
        edges.ok_or("header lacks edges")?,
    ))
}

pub(crate) fn node_ids_of(corpus: &Corpus) -> Vec<String> {
    corpus.iter().map(|d| d.id.clone()).collect()
}

/// One edge per resolvable outlink; links to ids outside the corpus are
/// dropped and counted.
pub fn build_hyperlink_graph(corpus: &Corpus) -> (DocumentGraph, GraphReport) {
    let mut report = GraphReport::default();
    let lists = corpus
        .iter()
        .map(|doc| {
            doc.outlinks
                .iter()
                .filter_map(|target| match corpus.position(target) {
                    Some(p) => Some(p as u32),
                    None => {
                        report.dangling_links += 1;
                        None
                    }
                })
                .collect()
        })
        .collect();
    if report.dangling_links > 0 {
        log::warn!("{} dangling link(s) dropped", report.dangling_links);
    }
    (
        DocumentGraph::from_successors(node_ids_of(corpus), lists, EdgeMode::Hyperlink),
        report,
    )
}
