use std::collections::BTreeSet;

use linkpack::graph::EdgeMode;
use linkpack::{Corpus, DocumentGraph};

/// Dense brute-force TF-IDF: every document against every other, in plain
/// nested loops over a dense term axis.
pub struct DenseOracle {
    pub ids: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

impl DenseOracle {
    pub fn new(corpus: &Corpus) -> Self {
        let docs: Vec<Vec<String>> = corpus
            .iter()
            .map(|d| {
                let mut words = Vec::new();
                let mut cur = String::new();
                for ch in d.text.chars() {
                    if ch.is_alphanumeric() {
                        cur.push(ch);
                    } else if !cur.is_empty() {
                        words.push(cur.to_lowercase());
                        cur.clear();
                    }
                }
                if !cur.is_empty() {
                    words.push(cur.to_lowercase());
                }
                words
            })
            .collect();
        let terms: Vec<String> = docs.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let n = docs.len() as f64;
        let idf: Vec<f64> = terms
            .iter()
            .map(|t| {
                let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
                ((1.0 + n) / (1.0 + df)).ln() + 1.0
            })
            .collect();
        let vectors = docs
            .iter()
            .map(|d| {
                let raw: Vec<f64> = terms
                    .iter()
                    .zip(&idf)
                    .map(|(t, w)| d.iter().filter(|x| *x == t).count() as f64 * w)
                    .collect();
                let mut sq = 0.0;
                for x in &raw {
                    if *x != 0.0 {
                        sq += x * x;
                    }
                }
                let norm = sq.sqrt();
                raw.into_iter().map(|x| if norm > 0.0 { x / norm } else { 0.0 }).collect()
            })
            .collect();
        DenseOracle {
            ids: corpus.iter().map(|d| d.id.clone()).collect(),
            vectors,
        }
    }

    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        let mut dot = 0.0;
        for (x, y) in self.vectors[a].iter().zip(&self.vectors[b]) {
            dot += x * y;
        }
        dot
    }

    /// Top-k by cosine descending then id ascending; zero vectors link nowhere.
    pub fn neighbors(&self, src: usize, k: usize) -> Vec<usize> {
        if self.vectors[src].iter().all(|&x| x == 0.0) {
            return Vec::new();
        }
        let mut others: Vec<usize> = (0..self.ids.len()).filter(|&j| j != src).collect();
        others.sort_by(|&a, &b| {
            self.cosine(src, b)
                .partial_cmp(&self.cosine(src, a))
                .unwrap()
                .then_with(|| self.ids[a].cmp(&self.ids[b]))
        });
        others.truncate(k);
        others.sort_unstable();
        others
    }
}

/// Node 0 links to nodes 1..=k; node `i` additionally receives
/// `in_degrees[i-1] - 1` links from filler nodes.
pub fn degree_graph(in_degrees: &[u32]) -> DocumentGraph {
    let k = in_degrees.len();
    let fillers = *in_degrees.iter().max().unwrap() as usize;
    let n = 1 + k + fillers;
    let mut lists = vec![Vec::new(); n];
    lists[0] = (1..=k as u32).collect();
    for (i, &d) in in_degrees.iter().enumerate() {
        for f in 0..(d - 1) as usize {
            lists[1 + k + f].push(1 + i as u32);
        }
    }
    DocumentGraph::from_successors((0..n).map(|i| format!("n{i}")).collect(), lists, EdgeMode::Hyperlink)
}
