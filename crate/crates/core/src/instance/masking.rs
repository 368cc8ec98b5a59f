use rand::seq::{index, IndexedRandom};
use rand::Rng;

use super::MaskConfig;
use crate::tokenizer::Vocabulary;

/// Number of positions to mask among `maskable`: `rate * maskable` rounded
/// half up, at least one whenever anything is maskable.
pub fn mask_count(maskable: usize, rate: f64) -> usize {
    if maskable == 0 {
        return 0;
    }
    // snap away binary noise such as 0.15 * 10 = 1.4999999999999998
    let exact = (rate * maskable as f64 * 1e9).round() / 1e9;
    ((exact + 0.5).floor() as usize).clamp(1, maskable)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedTokens {
    pub token_ids: Vec<u32>,
    pub positions: Vec<u32>,
    pub labels: Vec<u32>,
}

/// Selects `mask_count` of `maskable_positions` uniformly without replacement
/// and corrupts each: `[MASK]`, a random non-special id, or left unchanged,
/// with the configured fractions. Labels hold the original ids.
pub fn apply_mlm_masking<R: Rng + ?Sized>(
    token_ids: &[u32],
    maskable_positions: &[usize],
    cfg: &MaskConfig,
    vocab: &Vocabulary,
    rng: &mut R,
) -> MaskedTokens {
    let mut out = token_ids.to_vec();
    let count = mask_count(maskable_positions.len(), cfg.mask_rate);
    let mut positions: Vec<usize> = index::sample(rng, maskable_positions.len(), count)
        .into_iter()
        .map(|i| maskable_positions[i])
        .collect();
    positions.sort_unstable();

    let mask_id = vocab.specials().mask;
    let pool = vocab.ordinary_ids();
    let mut labels = Vec::with_capacity(count);
    for &p in &positions {
        labels.push(token_ids[p]);
        let u: f64 = rng.random();
        if u < cfg.replace_mask {
            out[p] = mask_id;
        } else if u < cfg.replace_mask + cfg.replace_random {
            // an all-special vocabulary leaves nothing to swap in
            if let Some(&id) = pool.choose(rng) {
                out[p] = id;
            }
        }
    }
    MaskedTokens {
        token_ids: out,
        positions: positions.into_iter().map(|p| p as u32).collect(),
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::instance_rng;

    fn vocab() -> Vocabulary {
        let mut toks: Vec<String> = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"].map(String::from).to_vec();
        toks.extend((0..50).map(|i| format!("w{i}")));
        Vocabulary::from_tokens(toks).unwrap()
    }

    #[test]
    fn counts_round_half_up() {
        assert_eq!(mask_count(20, 0.15), 3);
        assert_eq!(mask_count(1, 0.15), 1);
        assert_eq!(mask_count(0, 0.15), 0);
        assert_eq!(mask_count(10, 0.15), 2); // 1.5 rounds up
        assert_eq!(mask_count(30, 0.15), 5); // 4.5 rounds up
        assert_eq!(mask_count(509, 0.15), 76); // 76.35
        assert_eq!(mask_count(3, 1.0), 3);
    }

    #[test]
    fn masks_only_maskable_positions() {
        let v = vocab();
        let tokens: Vec<u32> = (0..22).map(|i| 5 + i).collect();
        let maskable: Vec<usize> = (1..21).collect();
        let mut rng = instance_rng(0, 0);
        let m = apply_mlm_masking(&tokens, &maskable, &MaskConfig::default(), &v, &mut rng);
        assert_eq!(m.positions.len(), 3);
        assert!(m.positions.windows(2).all(|w| w[0] < w[1]));
        for (&p, &l) in m.positions.iter().zip(&m.labels) {
            assert!((1..21).contains(&(p as usize)));
            assert_eq!(l, tokens[p as usize]);
        }
        for (i, (&got, &orig)) in m.token_ids.iter().zip(&tokens).enumerate() {
            if !m.positions.contains(&(i as u32)) {
                assert_eq!(got, orig);
            }
        }
    }

    #[test]
    fn single_and_empty_maskable_sets() {
        let v = vocab();
        let mut rng = instance_rng(1, 0);
        let m = apply_mlm_masking(&[2, 9, 3], &[1], &MaskConfig::default(), &v, &mut rng);
        assert_eq!(m.positions, vec![1]);
        assert_eq!(m.labels, vec![9]);
        let m = apply_mlm_masking(&[2, 3], &[], &MaskConfig::default(), &v, &mut rng);
        assert!(m.positions.is_empty());
        assert_eq!(m.token_ids, vec![2, 3]);
    }

    #[test]
    fn random_replacements_avoid_specials() {
        let v = vocab();
        let cfg = MaskConfig {
            replace_mask: 0.0,
            replace_random: 1.0,
            keep: 0.0,
            ..MaskConfig::default()
        };
        let tokens = vec![10u32; 200];
        let maskable: Vec<usize> = (0..200).collect();
        let mut rng = instance_rng(2, 0);
        let m = apply_mlm_masking(&tokens, &maskable, &cfg, &v, &mut rng);
        assert_eq!(m.positions.len(), 30);
        for &p in &m.positions {
            assert!(!v.specials().contains(m.token_ids[p as usize]));
        }
    }
}
