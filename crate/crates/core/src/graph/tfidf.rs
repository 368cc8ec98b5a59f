//! TF-IDF document similarity and top-k similarity graphs.
//!
//! Terms are lowercased runs of alphanumeric characters. Term frequency is
//! the raw count and idf uses the smoothed form `ln((1 + N) / (1 + df)) + 1`,
//! so every idf weight is at least 1. Document vectors are L2-normalized,
//! which makes cosine similarity a plain dot product.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{node_ids_of, DocumentGraph, EdgeMode, GraphReport};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub const DEFAULT_TOP_K: usize = 5;

/// Lowercased alphanumeric terms of `text`, in order of appearance.
pub fn tfidf_terms(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocabulary: HashMap<String, u32>,
    idf: Vec<f64>,
    /// Per document: `(column, weight)` sorted by column, unit L2 norm.
    doc_vectors: Vec<Vec<(u32, f64)>>,
}

impl TfIdfModel {
    pub fn vocabulary(&self) -> &HashMap<String, u32> {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn doc_count(&self) -> usize {
        self.doc_vectors.len()
    }

    pub fn vector(&self, doc: usize) -> &[(u32, f64)] {
        &self.doc_vectors[doc]
    }

    /// Cosine similarity of two documents of the fitted corpus.
    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        let (va, vb) = (&self.doc_vectors[a], &self.doc_vectors[b]);
        let (mut i, mut j, mut dot) = (0, 0, 0.0);
        while i < va.len() && j < vb.len() {
            match va[i].0.cmp(&vb[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += va[i].1 * vb[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot
    }
}

/// Fits TF-IDF weights over every document's full text.
pub fn fit_tfidf(corpus: &Corpus) -> (TfIdfModel, GraphReport) {
    let counts: Vec<BTreeMap<String, u32>> = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let mut tf = BTreeMap::new();
            for term in tfidf_terms(&doc.text) {
                *tf.entry(term).or_insert(0) += 1;
            }
            tf
        })
        .collect();

    // columns are assigned in sorted term order
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for tf in &counts {
        for term in tf.keys() {
            *df.entry(term.as_str()).or_insert(0) += 1;
        }
    }
    let n = corpus.len() as f64;
    let mut vocabulary = HashMap::with_capacity(df.len());
    let mut idf = Vec::with_capacity(df.len());
    for (col, (term, &d)) in df.iter().enumerate() {
        vocabulary.insert((*term).to_owned(), col as u32);
        idf.push(((1.0 + n) / (1.0 + d as f64)).ln() + 1.0);
    }

    let mut report = GraphReport::default();
    let doc_vectors: Vec<Vec<(u32, f64)>> = counts
        .par_iter()
        .map(|tf| {
            // BTreeMap iteration is in term order, which is column order
            let mut v: Vec<(u32, f64)> = tf
                .iter()
                .map(|(term, &c)| {
                    let col = vocabulary[term];
                    (col, c as f64 * idf[col as usize])
                })
                .collect();
            let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, w) in &mut v {
                    *w /= norm;
                }
            }
            v
        })
        .collect();
    report.empty_documents = doc_vectors.iter().filter(|v| v.is_empty()).count();
    if report.empty_documents > 0 {
        log::warn!("{} document(s) have no TF-IDF terms", report.empty_documents);
    }

    (
        TfIdfModel {
            vocabulary,
            idf,
            doc_vectors,
        },
        report,
    )
}

/// Links each document to its `k` most cosine-similar other documents.
///
/// Ranking is by similarity descending, then document id ascending. When
/// fewer than `k` documents share a term with the source, the remaining slots
/// go to zero-similarity documents in id order, so `k >= N - 1` links a
/// document to every other one. Documents without terms get no edges.
pub fn build_tfidf_graph(corpus: &Corpus, model: &TfIdfModel, k: usize) -> Result<(DocumentGraph, GraphReport)> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if model.doc_count() != corpus.len() {
        return Err(Error::Config(format!(
            "TF-IDF model covers {} documents but the corpus has {}",
            model.doc_count(),
            corpus.len()
        )));
    }
    let n = corpus.len();
    let ids: Vec<&str> = corpus.iter().map(|d| d.id.as_str()).collect();
    let mut by_id: Vec<u32> = (0..n as u32).collect();
    by_id.sort_by(|&a, &b| ids[a as usize].cmp(ids[b as usize]));

    let mut postings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); model.idf.len()];
    for (doc, v) in model.doc_vectors.iter().enumerate() {
        for &(col, w) in v {
            postings[col as usize].push((doc as u32, w));
        }
    }

    let lists: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], vec![false; n], Vec::<u32>::new()),
            |(scores, marked, touched), src| {
                let v = &model.doc_vectors[src];
                if v.is_empty() {
                    return Vec::new();
                }
                for &(col, w) in v {
                    for &(dst, wd) in &postings[col as usize] {
                        if !marked[dst as usize] {
                            marked[dst as usize] = true;
                            touched.push(dst);
                        }
                        scores[dst as usize] += w * wd;
                    }
                }
                let mut ranked: Vec<(f64, u32)> = touched
                    .iter()
                    .filter(|&&d| d as usize != src)
                    .map(|&d| (scores[d as usize], d))
                    .collect();
                ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| ids[a.1 as usize].cmp(ids[b.1 as usize])));
                let mut chosen: Vec<u32> = ranked.iter().take(k).map(|&(_, d)| d).collect();
                if chosen.len() < k {
                    let need = k - chosen.len();
                    chosen.extend(
                        by_id
                            .iter()
                            .copied()
                            .filter(|&d| d as usize != src && !marked[d as usize])
                            .take(need),
                    );
                }
                for &d in touched.iter() {
                    scores[d as usize] = 0.0;
                    marked[d as usize] = false;
                }
                touched.clear();
                chosen
            },
        )
        .collect();

    let report = GraphReport {
        empty_documents: model.doc_vectors.iter().filter(|v| v.is_empty()).count(),
        ..GraphReport::default()
    };
    Ok((DocumentGraph::from_successors(node_ids_of(corpus), lists, EdgeMode::Tfidf), report))
}
