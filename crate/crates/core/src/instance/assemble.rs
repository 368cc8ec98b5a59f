use rand::Rng;

use super::{apply_mlm_masking, MixConfig, SegmentPair, TokenizedCorpus, TrainingInstance};
use crate::tokenizer::Vocabulary;

/// Drops tail tokens from whichever segment is longer (the second on ties)
/// until both fit in `budget` tokens.
pub fn truncate_pair(a: &mut Vec<u32>, b: &mut Vec<u32>, budget: usize) {
    while a.len() + b.len() > budget {
        if a.len() > b.len() {
            a.pop();
        } else {
            b.pop();
        }
    }
}

/// Packs `[CLS] A [SEP] B [SEP]`, masks it and attaches the relation label.
/// Returns `None` when truncation empties a segment.
pub fn assemble_instance<R: Rng + ?Sized>(
    pair: &SegmentPair,
    corpus: &TokenizedCorpus,
    vocab: &Vocabulary,
    mix: &MixConfig,
    rng: &mut R,
) -> Option<TrainingInstance> {
    let mut a = corpus.span_tokens(pair.anchor_doc, &pair.anchor_span).to_vec();
    let mut b = corpus.span_tokens(pair.partner_doc, &pair.partner_span).to_vec();
    truncate_pair(&mut a, &mut b, mix.max_seq_len.saturating_sub(3));
    if a.is_empty() || b.is_empty() {
        return None;
    }

    let sp = vocab.specials();
    let len = a.len() + b.len() + 3;
    let first_sep = a.len() + 1;
    let mut token_ids = Vec::with_capacity(len);
    token_ids.push(sp.cls);
    token_ids.extend_from_slice(&a);
    token_ids.push(sp.sep);
    token_ids.extend_from_slice(&b);
    token_ids.push(sp.sep);
    let type_ids = (0..len).map(|i| u8::from(i > first_sep)).collect();

    let maskable: Vec<usize> = (1..first_sep).chain(first_sep + 1..len - 1).collect();
    let masked = apply_mlm_masking(&token_ids, &maskable, &mix.mask, vocab, rng);

    Some(TrainingInstance {
        token_ids: masked.token_ids,
        type_ids,
        mlm_positions: masked.positions,
        mlm_labels: masked.labels,
        drp_label: pair.option.label(),
        anchor_doc: corpus.id(pair.anchor_doc).to_owned(),
        partner_doc: corpus.id(pair.partner_doc).to_owned(),
        option: pair.option,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The truncation loop traced one pop at a time, kept separate from
    /// `truncate_pair` so the expected lengths are not computed by it.
    fn simulate(mut la: usize, mut lb: usize, budget: usize) -> (usize, usize) {
        while la + lb > budget {
            if la > lb {
                la -= 1;
            } else {
                lb -= 1;
            }
        }
        (la, lb)
    }

    #[test]
    fn fits_without_truncation() {
        let mut a = vec![7; 254];
        let mut b = vec![8; 254];
        truncate_pair(&mut a, &mut b, 509);
        assert_eq!((a.len(), b.len()), (254, 254));
    }

    #[test]
    fn equal_long_segments_alternate() {
        assert_eq!(simulate(300, 300, 509), (255, 254));
        let mut a: Vec<u32> = (0..300).collect();
        let mut b: Vec<u32> = (1000..1300).collect();
        truncate_pair(&mut a, &mut b, 509);
        assert_eq!((a.len(), b.len()), (255, 254));
        assert_eq!(a.len() + b.len() + 3, 512);
        // tail truncation keeps prefixes
        assert_eq!(a[..], (0..255).collect::<Vec<_>>()[..]);
        assert_eq!(b.last(), Some(&1253));
    }

    #[test]
    fn lopsided_segments() {
        let mut a = vec![1; 500];
        let mut b = vec![2; 20];
        truncate_pair(&mut a, &mut b, 509);
        assert_eq!((a.len(), b.len()), (489, 20));
        assert_eq!(simulate(500, 20, 509), (489, 20));
    }
}
