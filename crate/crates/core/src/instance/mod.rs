//! Pretraining instance construction.
//!
//! An instance pairs an anchor segment with a partner segment that is either
//! the next segment of the same document, a segment of a random other
//! document, or a segment of a document the anchor links to. The pair is
//! packed as `[CLS] A [SEP] B [SEP]`, masked for MLM, and labelled with the
//! relation it was built from.

mod assemble;
mod config;
mod masking;
mod sampling;
mod segment;
mod stream;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tokenizer::SpecialIds;

pub use assemble::{assemble_instance, truncate_pair};
pub use config::{MaskConfig, MixConfig, DEFAULT_MAX_SEQ_LEN};
pub use masking::{apply_mlm_masking, mask_count, MaskedTokens};
pub use sampling::{build_pair, choose_option, sample_linked_document, PairSampler};
pub use segment::{default_target_len, segment_document, segment_tokens, TokenizedCorpus, MIN_SEGMENT_TOKENS};
pub use stream::{generate_stream, read_instances, GenerationReport, InstanceGenerator};

/// How the partner segment relates to the anchor. The discriminant is the
/// relation-prediction label written to instance records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Contiguous = 0,
    Random = 1,
    Linked = 2,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Contiguous, Relation::Random, Relation::Linked];

    pub fn label(self) -> u8 {
        self as u8
    }

    pub fn from_label(label: u8) -> Option<Self> {
        Self::ALL.get(label as usize).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Contiguous => "contiguous",
            Relation::Random => "random",
            Relation::Linked => "linked",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Relation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown relation {s:?}")))
    }
}

/// An anchor segment and its partner, as corpus positions and token ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPair {
    pub anchor_doc: usize,
    pub partner_doc: usize,
    pub anchor_span: Range<usize>,
    pub partner_span: Range<usize>,
    pub option: Relation,
}

/// One packed, masked, labelled input. Field order is the record order of the
/// line-delimited output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingInstance {
    pub token_ids: Vec<u32>,
    pub type_ids: Vec<u8>,
    pub mlm_positions: Vec<u32>,
    pub mlm_labels: Vec<u32>,
    pub drp_label: u8,
    pub anchor_doc: String,
    pub partner_doc: String,
    pub option: Relation,
}

impl TrainingInstance {
    /// Index of the first `[SEP]`, i.e. one past the anchor segment.
    pub fn first_sep(&self, sep: u32) -> Option<usize> {
        self.token_ids.iter().position(|&t| t == sep)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("instance serialization is infallible")
    }

    /// Checks the structural invariants of a packed instance.
    pub fn validate(&self, specials: SpecialIds, max_seq_len: usize, mask_rate: f64) -> Result<(), String> {
        let n = self.token_ids.len();
        if n > max_seq_len {
            return Err(format!("length {n} exceeds {max_seq_len}"));
        }
        if self.token_ids.first() != Some(&specials.cls) {
            return Err("first token is not [CLS]".into());
        }
        if self.token_ids[1..].contains(&specials.cls) {
            return Err("[CLS] appears after position 0".into());
        }
        let seps: Vec<usize> = (0..n).filter(|&i| self.token_ids[i] == specials.sep).collect();
        if seps.len() != 2 || seps[1] != n - 1 {
            return Err(format!("expected two [SEP] with the last at the end, found {seps:?}"));
        }
        if seps[0] < 2 || seps[1] - seps[0] < 2 {
            return Err("empty segment".into());
        }
        if self.type_ids.len() != n {
            return Err("type_ids length mismatch".into());
        }
        for (i, &t) in self.type_ids.iter().enumerate() {
            let expected = u8::from(i > seps[0]);
            if t != expected {
                return Err(format!("type id {t} at {i}, expected {expected}"));
            }
        }
        if self.mlm_positions.len() != self.mlm_labels.len() {
            return Err("mlm positions/labels length mismatch".into());
        }
        if !self.mlm_positions.windows(2).all(|w| w[0] < w[1]) {
            return Err("mlm positions not strictly increasing".into());
        }
        for &p in &self.mlm_positions {
            let p = p as usize;
            if p == 0 || p >= n || seps.contains(&p) {
                return Err(format!("mlm position {p} is a special or out of range"));
            }
        }
        let maskable = n - 3;
        let expected = mask_count(maskable, mask_rate);
        if self.mlm_positions.len() != expected {
            return Err(format!(
                "{} masked positions, expected {expected} of {maskable}",
                self.mlm_positions.len()
            ));
        }
        if self.drp_label != self.option.label() {
            return Err(format!("drp_label {} does not match option {}", self.drp_label, self.option));
        }
        match self.option {
            Relation::Contiguous if self.anchor_doc != self.partner_doc => {
                Err("contiguous pair spans two documents".into())
            }
            Relation::Random if self.anchor_doc == self.partner_doc => Err("random pair uses one document".into()),
            _ => Ok(()),
        }
    }
}
