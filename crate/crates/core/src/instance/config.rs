use serde::Serialize;

use super::Relation;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_SEQ_LEN: usize = 512;

/// MLM corruption rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskConfig {
    /// Fraction of maskable tokens selected as prediction targets.
    pub mask_rate: f64,
    pub replace_mask: f64,
    pub replace_random: f64,
    pub keep: f64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        MaskConfig {
            mask_rate: 0.15,
            replace_mask: 0.8,
            replace_random: 0.1,
            keep: 0.1,
        }
    }
}

impl MaskConfig {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.replace_mask, self.replace_random, self.keep];
        if !(0.0..=1.0).contains(&self.mask_rate) {
            return Err(Error::Config(format!("mask rate {} outside [0, 1]", self.mask_rate)));
        }
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("replacement fractions {parts:?} must be nonnegative and sum to 1")));
        }
        Ok(())
    }
}

/// Relation mix, packing budget, seed and masking for instance generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixConfig {
    pub p_contiguous: f64,
    pub p_random: f64,
    pub p_linked: f64,
    pub max_seq_len: usize,
    pub seed: u64,
    pub mask: MaskConfig,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig {
            p_contiguous: 1.0 / 3.0,
            p_random: 1.0 / 3.0,
            p_linked: 1.0 / 3.0,
            max_seq_len: DEFAULT_MAX_SEQ_LEN,
            seed: 0,
            mask: MaskConfig::default(),
        }
    }
}

impl MixConfig {
    /// Mix from three nonnegative weights (contiguous, random, linked),
    /// normalized to sum to one.
    pub fn from_weights(weights: [f64; 3]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || total <= 0.0 {
            return Err(Error::Config(format!(
                "mix weights {weights:?} must be nonnegative with a positive sum"
            )));
        }
        Ok(MixConfig {
            p_contiguous: weights[0] / total,
            p_random: weights[1] / total,
            p_linked: weights[2] / total,
            ..MixConfig::default()
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_seq_len(mut self, max_seq_len: usize) -> Self {
        self.max_seq_len = max_seq_len;
        self
    }

    pub fn probabilities(&self) -> [f64; 3] {
        [self.p_contiguous, self.p_random, self.p_linked]
    }

    pub fn probability(&self, option: Relation) -> f64 {
        self.probabilities()[option as usize]
    }

    /// Option probabilities after the linked share of a linkless corpus is
    /// split evenly between contiguous and random.
    pub fn effective_probabilities(&self, linkless: bool) -> [f64; 3] {
        if linkless {
            let half = self.p_linked / 2.0;
            [self.p_contiguous + half, self.p_random + half, 0.0]
        } else {
            self.probabilities()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.probabilities();
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("mix probabilities {p:?} must be nonnegative and sum to 1")));
        }
        if self.max_seq_len < 5 {
            return Err(Error::Config(format!(
                "max_seq_len {} leaves no room for two segments and three specials",
                self.max_seq_len
            )));
        }
        self.mask.validate()
    }
}
