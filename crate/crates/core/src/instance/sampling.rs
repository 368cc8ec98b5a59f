use rand::Rng;

use super::{MixConfig, Relation, SegmentPair, TokenizedCorpus};
use crate::error::{Error, Result};
use crate::graph::DocumentGraph;

/// Index drawn from `weights` (not necessarily normalized). Returns `None`
/// when every weight is zero.
fn draw_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if w > 0.0 && target < acc {
            return Some(i);
        }
    }
    // rounding can leave target just above the final sum
    weights.iter().rposition(|&w| w > 0.0)
}

/// Draws a relation with the mix probabilities. For a linkless corpus the
/// linked share is split evenly between contiguous and random.
pub fn choose_option<R: Rng + ?Sized>(mix: &MixConfig, linkless: bool, rng: &mut R) -> Relation {
    let p = mix.effective_probabilities(linkless);
    let i = draw_weighted(&p, rng).expect("validated mix has positive mass");
    Relation::ALL[i]
}

/// Picks a successor of `anchor` with probability proportional to the inverse
/// of its in-degree in `graph`.
pub fn sample_linked_document<R: Rng + ?Sized>(graph: &DocumentGraph, anchor: usize, rng: &mut R) -> Result<usize> {
    let succ = graph.successors(anchor);
    match succ {
        [] => Err(Error::NoOutlinks(graph.node_id(anchor).to_owned())),
        [only] => Ok(*only as usize),
        _ => {
            // every edge target has in-degree >= 1
            let weights: Vec<f64> = succ.iter().map(|&v| 1.0 / graph.in_degree(v as usize) as f64).collect();
            let i = draw_weighted(&weights, rng).expect("successor weights are positive");
            Ok(succ[i] as usize)
        }
    }
}

/// Pair sampling over one tokenized corpus and graph. Options that cannot be
/// realized anywhere in the corpus (random with one document, contiguous when
/// no document has two segments) get zero probability.
#[derive(Debug, Clone)]
pub struct PairSampler<'a> {
    corpus: &'a TokenizedCorpus,
    graph: &'a DocumentGraph,
    weights: [f64; 3],
    linkless: bool,
}

impl<'a> PairSampler<'a> {
    pub fn new(corpus: &'a TokenizedCorpus, graph: &'a DocumentGraph, mix: &MixConfig) -> Result<Self> {
        mix.validate()?;
        if corpus.is_empty() {
            return Err(Error::InfeasibleMix("corpus is empty".into()));
        }
        if graph.node_ids() != corpus.ids() {
            return Err(Error::Config("graph nodes do not match the corpus documents".into()));
        }
        let linkless = graph.edge_count() == 0;
        let mut weights = mix.effective_probabilities(linkless);
        if corpus.len() < 2 {
            weights[Relation::Random as usize] = 0.0;
        }
        if (0..corpus.len()).all(|d| corpus.segments(d).len() < 2) {
            weights[Relation::Contiguous as usize] = 0.0;
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InfeasibleMix(format!(
                "mix {:?} over {} document(s), {} edge(s)",
                mix.probabilities(),
                corpus.len(),
                graph.edge_count()
            )));
        }
        Ok(PairSampler {
            corpus,
            graph,
            weights,
            linkless,
        })
    }

    pub fn linkless(&self) -> bool {
        self.linkless
    }

    /// Probabilities actually used for the first option draw.
    pub fn option_weights(&self) -> [f64; 3] {
        self.weights
    }

    fn anchor<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let doc = rng.random_range(0..self.corpus.len());
        let seg = rng.random_range(0..self.corpus.segments(doc).len());
        (doc, seg)
    }

    fn uniform_segment<R: Rng + ?Sized>(&self, doc: usize, rng: &mut R) -> usize {
        rng.random_range(0..self.corpus.segments(doc).len())
    }

    fn pair(&self, anchor: (usize, usize), partner: (usize, usize), option: Relation) -> SegmentPair {
        SegmentPair {
            anchor_doc: anchor.0,
            partner_doc: partner.0,
            anchor_span: self.corpus.segments(anchor.0)[anchor.1].clone(),
            partner_span: self.corpus.segments(partner.0)[partner.1].clone(),
            option,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SegmentPair {
        loop {
            let mut anchor = self.anchor(rng);
            let mut option = Relation::ALL[draw_weighted(&self.weights, rng).expect("positive mass")];

            if option == Relation::Linked && self.graph.successors(anchor.0).is_empty() {
                let mut fallback = self.weights;
                fallback[Relation::Linked as usize] = 0.0;
                match draw_weighted(&fallback, rng) {
                    Some(i) => option = Relation::ALL[i],
                    None => continue,
                }
            }

            return match option {
                Relation::Contiguous => {
                    while anchor.1 + 1 >= self.corpus.segments(anchor.0).len() {
                        anchor = self.anchor(rng);
                    }
                    self.pair(anchor, (anchor.0, anchor.1 + 1), option)
                }
                Relation::Random => {
                    let mut doc = rng.random_range(0..self.corpus.len() - 1);
                    if doc >= anchor.0 {
                        doc += 1;
                    }
                    let seg = self.uniform_segment(doc, rng);
                    self.pair(anchor, (doc, seg), option)
                }
                Relation::Linked => {
                    let doc = sample_linked_document(self.graph, anchor.0, rng).expect("anchor has outlinks");
                    let seg = self.uniform_segment(doc, rng);
                    self.pair(anchor, (doc, seg), option)
                }
            };
        }
    }
}

/// Samples one segment pair; see [`PairSampler`].
pub fn build_pair<R: Rng + ?Sized>(
    corpus: &TokenizedCorpus,
    graph: &DocumentGraph,
    mix: &MixConfig,
    rng: &mut R,
) -> Result<SegmentPair> {
    Ok(PairSampler::new(corpus, graph, mix)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_corpus;
    use crate::graph::{build_hyperlink_graph, EdgeMode};
    use crate::rng::instance_rng;
    use crate::tokenizer::{Tokenizer, Vocabulary};

    fn tokenizer() -> Tokenizer {
        let mut toks: Vec<String> = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"].map(String::from).to_vec();
        toks.extend((0..20).map(|i| format!("w{i}")));
        Tokenizer::new(Vocabulary::from_tokens(toks).unwrap())
    }

    fn text(n: usize) -> String {
        (0..n).map(|i| format!("w{}", i % 20)).collect::<Vec<_>>().join(" ")
    }

    fn setup(docs: &[(&str, usize, &[&str])], target: usize) -> (TokenizedCorpus, DocumentGraph) {
        let lines: Vec<String> = docs
            .iter()
            .map(|(id, n, links)| serde_json::json!({"id": id, "text": text(*n), "links": links}).to_string())
            .collect();
        let corpus = read_corpus(lines.join("\n").as_bytes()).unwrap().0;
        let tc = TokenizedCorpus::build(&corpus, &tokenizer(), target).unwrap();
        let (g, _) = build_hyperlink_graph(&corpus);
        (tc, g)
    }

    #[test]
    fn degenerate_mix_is_constant() {
        let mix = MixConfig::from_weights([1.0, 0.0, 0.0]).unwrap();
        let mut rng = instance_rng(0, 0);
        for _ in 0..1000 {
            assert_eq!(choose_option(&mix, false, &mut rng), Relation::Contiguous);
        }
    }

    #[test]
    fn linkless_never_links() {
        let mix = MixConfig::default();
        let mut rng = instance_rng(0, 1);
        for _ in 0..1000 {
            assert_ne!(choose_option(&mix, true, &mut rng), Relation::Linked);
        }
    }

    #[test]
    fn inverse_in_degree_weights() {
        // A -> B, A -> C; C also linked by D and E, so in-degrees B=1, C=3
        let (_, g) = setup(
            &[("A", 5, &["B", "C"]), ("B", 5, &[]), ("C", 5, &[]), ("D", 5, &["C"]), ("E", 5, &["C"])],
            4,
        );
        assert_eq!(g.in_degree(1), 1);
        assert_eq!(g.in_degree(2), 3);
        let mut rng = instance_rng(3, 0);
        let draws = 40_000;
        let b = (0..draws).filter(|_| sample_linked_document(&g, 0, &mut rng).unwrap() == 1).count();
        assert!((b as f64 / draws as f64 - 0.75).abs() < 0.01);
        assert!(matches!(sample_linked_document(&g, 1, &mut rng), Err(Error::NoOutlinks(_))));
    }

    #[test]
    fn single_outlink_is_certain() {
        let (_, g) = setup(&[("A", 5, &["B"]), ("B", 5, &[])], 4);
        let mut rng = instance_rng(0, 0);
        for _ in 0..100 {
            assert_eq!(sample_linked_document(&g, 0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn forced_contiguous_on_two_segment_document() {
        let (tc, g) = setup(&[("A", 40, &[])], 20);
        assert_eq!(tc.segments(0).len(), 2);
        let mix = MixConfig::from_weights([1.0, 0.0, 0.0]).unwrap();
        let mut rng = instance_rng(0, 0);
        for _ in 0..50 {
            let p = build_pair(&tc, &g, &mix, &mut rng).unwrap();
            assert_eq!((p.anchor_span, p.partner_span, p.option), (0..20, 20..40, Relation::Contiguous));
        }
    }

    #[test]
    fn no_outlink_anchor_falls_back() {
        let (tc, g) = setup(&[("A", 40, &["B"]), ("B", 40, &[]), ("C", 40, &[])], 20);
        let mix = MixConfig::default();
        let sampler = PairSampler::new(&tc, &g, &mix).unwrap();
        let mut rng = instance_rng(5, 0);
        for _ in 0..3000 {
            let p = sampler.sample(&mut rng);
            if p.option == Relation::Linked {
                assert_eq!((p.anchor_doc, p.partner_doc), (0, 1));
            }
            if p.anchor_doc != 0 {
                assert_ne!(p.option, Relation::Linked);
            }
        }
    }

    #[test]
    fn forced_link_follows_edge() {
        let (tc, g) = setup(&[("A", 5, &["B"]), ("B", 5, &[])], 4);
        let mix = MixConfig::from_weights([0.0, 0.0, 1.0]).unwrap();
        let mut rng = instance_rng(0, 0);
        for _ in 0..100 {
            let p = build_pair(&tc, &g, &mix, &mut rng).unwrap();
            assert_eq!((p.anchor_doc, p.partner_doc, p.option), (0, 1, Relation::Linked));
        }
    }

    #[test]
    fn single_document_random_redraws_to_contiguous() {
        let (tc, g) = setup(&[("A", 40, &[])], 20);
        let mix = MixConfig::from_weights([1.0, 1.0, 0.0]).unwrap();
        let mut rng = instance_rng(0, 0);
        for _ in 0..100 {
            assert_eq!(build_pair(&tc, &g, &mix, &mut rng).unwrap().option, Relation::Contiguous);
        }
    }

    #[test]
    fn infeasible_mixes_are_rejected() {
        // one single-segment document: neither contiguous nor random possible
        let (tc, g) = setup(&[("A", 5, &[])], 20);
        assert!(matches!(PairSampler::new(&tc, &g, &MixConfig::default()), Err(Error::InfeasibleMix(_))));
        let (tc, _) = setup(&[("A", 5, &[]), ("B", 5, &[])], 20);
        let other = DocumentGraph::from_successors(vec!["X".into(), "Y".into()], vec![vec![], vec![]], EdgeMode::Random);
        assert!(PairSampler::new(&tc, &other, &MixConfig::default()).is_err());
    }
}
