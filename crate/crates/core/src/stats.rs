//! Exact summaries of instance streams and document graphs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{DocumentGraph, EdgeMode};
use crate::instance::{Relation, TrainingInstance};

/// `[MASK]` / random / keep counts over all masked positions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ReplacementCounts {
    pub mask: u64,
    pub random: u64,
    pub keep: u64,
}

impl ReplacementCounts {
    pub fn total(&self) -> u64 {
        self.mask + self.random + self.keep
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamStats {
    pub instance_count: u64,
    pub option_counts: [u64; 3],
    /// Fractions per relation label; absent for an empty stream.
    pub option_frequencies: Option<[f64; 3]>,
    pub maskable_tokens: u64,
    pub masked_tokens: u64,
    pub mask_rate: f64,
    pub mask_token_id: Option<u32>,
    pub replacement_counts: ReplacementCounts,
    /// `[mask, random, keep]` fractions; absent when nothing was masked.
    pub replacement_split: Option<[f64; 3]>,
    pub length_histogram: BTreeMap<usize, u64>,
    /// In-degree of the partner document of linked instances; needs a graph.
    pub partner_in_degree_histogram: Option<BTreeMap<u32, u64>>,
}

/// Mergeable accumulator behind [`summarize_stream`].
#[derive(Debug, Clone, Default)]
pub struct StreamAccumulator {
    instance_count: u64,
    option_counts: [u64; 3],
    maskable_tokens: u64,
    masked_tokens: u64,
    /// Masked positions whose token equals the label.
    unchanged: u64,
    /// Replacement ids at masked positions whose token differs from the label.
    changed: HashMap<u32, u64>,
    lengths: BTreeMap<usize, u64>,
    partner_in_degree: BTreeMap<u32, u64>,
}

impl StreamAccumulator {
    pub fn add(&mut self, inst: &TrainingInstance, graph: Option<&GraphLookup<'_>>) {
        self.instance_count += 1;
        self.option_counts[inst.drp_label.min(2) as usize] += 1;
        // every token but [CLS] and the two [SEP]s is maskable
        self.maskable_tokens += inst.token_ids.len().saturating_sub(3) as u64;
        self.masked_tokens += inst.mlm_positions.len() as u64;
        for (&p, &label) in inst.mlm_positions.iter().zip(&inst.mlm_labels) {
            let tok = inst.token_ids.get(p as usize).copied().unwrap_or(label);
            if tok == label {
                self.unchanged += 1;
            } else {
                *self.changed.entry(tok).or_insert(0) += 1;
            }
        }
        *self.lengths.entry(inst.token_ids.len()).or_insert(0) += 1;
        if let Some(lookup) = graph {
            if inst.option == Relation::Linked {
                if let Some(d) = lookup.in_degree(&inst.partner_doc) {
                    *self.partner_in_degree.entry(d).or_insert(0) += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: StreamAccumulator) {
        self.instance_count += other.instance_count;
        for (a, b) in self.option_counts.iter_mut().zip(other.option_counts) {
            *a += b;
        }
        self.maskable_tokens += other.maskable_tokens;
        self.masked_tokens += other.masked_tokens;
        self.unchanged += other.unchanged;
        for (k, v) in other.changed {
            *self.changed.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.lengths {
            *self.lengths.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.partner_in_degree {
            *self.partner_in_degree.entry(k).or_insert(0) += v;
        }
    }

    /// Finishes the summary. Without a known `[MASK]` id, the id that most
    /// often replaces masked tokens is taken as `[MASK]`.
    pub fn finish(self, mask_id: Option<u32>, with_graph: bool) -> StreamStats {
        let mask_id = mask_id.or_else(|| {
            self.changed
                .iter()
                .max_by_key(|(&id, &n)| (n, std::cmp::Reverse(id)))
                .map(|(&id, _)| id)
        });
        let mask = mask_id.and_then(|m| self.changed.get(&m).copied()).unwrap_or(0);
        let replaced: u64 = self.changed.values().sum();
        let counts = ReplacementCounts {
            mask,
            random: replaced - mask,
            keep: self.unchanged,
        };
        let total = counts.total();
        let ratio = |a: u64, b: u64| a as f64 / b as f64;
        StreamStats {
            instance_count: self.instance_count,
            option_counts: self.option_counts,
            option_frequencies: (self.instance_count > 0)
                .then(|| self.option_counts.map(|c| ratio(c, self.instance_count))),
            maskable_tokens: self.maskable_tokens,
            masked_tokens: self.masked_tokens,
            mask_rate: if self.maskable_tokens > 0 {
                ratio(self.masked_tokens, self.maskable_tokens)
            } else {
                0.0
            },
            mask_token_id: mask_id,
            replacement_counts: counts,
            replacement_split: (total > 0)
                .then(|| [ratio(counts.mask, total), ratio(counts.random, total), ratio(counts.keep, total)]),
            length_histogram: self.lengths,
            partner_in_degree_histogram: with_graph.then_some(self.partner_in_degree),
        }
    }
}

/// Document id to in-degree lookup over a graph.
pub struct GraphLookup<'a> {
    graph: &'a DocumentGraph,
    index: HashMap<&'a str, usize>,
}

impl<'a> GraphLookup<'a> {
    pub fn new(graph: &'a DocumentGraph) -> Self {
        let index = graph.node_ids().iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        GraphLookup { graph, index }
    }

    pub fn in_degree(&self, id: &str) -> Option<u32> {
        self.index.get(id).map(|&i| self.graph.in_degree(i))
    }
}

/// Exact counts over a stream of instance records. `mask_id` is the vocab's
/// `[MASK]` id when known.
pub fn summarize_stream<I>(instances: I, mask_id: Option<u32>, graph: Option<&DocumentGraph>) -> Result<StreamStats>
where
    I: IntoIterator<Item = Result<TrainingInstance>>,
{
    let lookup = graph.map(GraphLookup::new);
    let mut acc = StreamAccumulator::default();
    for inst in instances {
        acc.add(&inst?, lookup.as_ref());
    }
    Ok(acc.finish(mask_id, graph.is_some()))
}

impl fmt::Display for StreamStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances: {}", self.instance_count)?;
        for r in Relation::ALL {
            let frac = self.option_frequencies.map_or(0.0, |p| p[r as usize]);
            writeln!(f, "  {:<10} {:>10} ({:.4})", r.as_str(), self.option_counts[r as usize], frac)?;
        }
        writeln!(
            f,
            "masked: {} of {} maskable tokens ({:.4})",
            self.masked_tokens, self.maskable_tokens, self.mask_rate
        )?;
        match self.replacement_split {
            Some([m, r, k]) => writeln!(f, "replacement: mask {m:.4} random {r:.4} keep {k:.4}")?,
            None => writeln!(f, "replacement: n/a")?,
        }
        if let (Some(min), Some(max)) = (self.length_histogram.keys().next(), self.length_histogram.keys().last()) {
            writeln!(f, "lengths: {min}..={max}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InDegreeQuantiles {
    pub min: u32,
    pub p25: u32,
    pub p50: u32,
    pub p75: u32,
    pub p90: u32,
    pub p99: u32,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub mode: EdgeMode,
    pub nodes: usize,
    pub edges: usize,
    pub max_in_degree: u32,
    pub max_out_degree: usize,
    pub mean_in_degree: f64,
    pub zero_in_degree_nodes: usize,
    pub nodes_without_outlinks: usize,
    /// Nearest-rank quantiles of the in-degree distribution.
    pub in_degree_quantiles: InDegreeQuantiles,
}

pub fn graph_stats(graph: &DocumentGraph) -> GraphSummary {
    let mut deg: Vec<u32> = graph.in_degrees().to_vec();
    deg.sort_unstable();
    let q = |p: f64| -> u32 {
        if deg.is_empty() {
            return 0;
        }
        let rank = ((p * deg.len() as f64).ceil() as usize).clamp(1, deg.len());
        deg[rank - 1]
    };
    let n = graph.node_count();
    GraphSummary {
        mode: graph.mode(),
        nodes: n,
        edges: graph.edge_count(),
        max_in_degree: deg.last().copied().unwrap_or(0),
        max_out_degree: (0..n).map(|v| graph.successors(v).len()).max().unwrap_or(0),
        mean_in_degree: if n > 0 { graph.edge_count() as f64 / n as f64 } else { 0.0 },
        zero_in_degree_nodes: deg.iter().take_while(|&&d| d == 0).count(),
        nodes_without_outlinks: (0..n).filter(|&v| graph.successors(v).is_empty()).count(),
        in_degree_quantiles: InDegreeQuantiles {
            min: deg.first().copied().unwrap_or(0),
            p25: q(0.25),
            p50: q(0.5),
            p75: q(0.75),
            p90: q(0.9),
            p99: q(0.99),
            max: deg.last().copied().unwrap_or(0),
        },
    }
}

impl fmt::Display for GraphSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.in_degree_quantiles;
        writeln!(f, "graph ({}): {} nodes, {} edges", self.mode, self.nodes, self.edges)?;
        writeln!(
            f,
            "in-degree: mean {:.3} min {} p50 {} p90 {} p99 {} max {}",
            self.mean_in_degree, q.min, q.p50, q.p90, q.p99, q.max
        )?;
        writeln!(
            f,
            "{} node(s) with no inlinks, {} with no outlinks",
            self.zero_in_degree_nodes, self.nodes_without_outlinks
        )
    }
}
