use rand::seq::index;
use rayon::prelude::*;

use super::{node_ids_of, DocumentGraph, EdgeMode, GraphReport};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Purpose};

/// Gives every node `out_degree` distinct successors drawn uniformly from the
/// other nodes. Requests at or above the corpus size are clamped to `N - 1`.
pub fn build_random_graph(corpus: &Corpus, out_degree: usize, seed: u64) -> Result<(DocumentGraph, GraphReport)> {
    let n = corpus.len();
    if out_degree == 0 {
        return Err(Error::Config("out-degree must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::Config(format!("random graph needs at least 2 documents, corpus has {n}")));
    }
    let mut report = GraphReport::default();
    let degree = if out_degree >= n {
        log::warn!("out-degree {out_degree} clamped to {}", n - 1);
        report.clamped_out_degree = Some(n - 1);
        n - 1
    } else {
        out_degree
    };

    let lists: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|src| {
            let mut rng = stream_rng(seed, Purpose::RandomGraph, src as u64);
            // sample among the n - 1 other nodes, skipping over src
            index::sample(&mut rng, n - 1, degree)
                .into_iter()
                .map(|i| if i >= src { i + 1 } else { i } as u32)
                .collect()
        })
        .collect();

    Ok((
        DocumentGraph::from_successors(node_ids_of(corpus), lists, EdgeMode::Random),
        report,
    ))
}
