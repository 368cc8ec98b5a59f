use std::ops::Range;

use rayon::prelude::*;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::tokenizer::Tokenizer;

/// A trailing remainder shorter than this is folded into the previous segment.
pub const MIN_SEGMENT_TOKENS: usize = 16;

/// Segment length that lets two segments and three specials fill `max_seq_len`.
pub fn default_target_len(max_seq_len: usize) -> usize {
    (max_seq_len.saturating_sub(3) / 2).max(1)
}

/// Splits `n_tokens` into consecutive spans of `target_len`.
pub fn segment_tokens(n_tokens: usize, target_len: usize) -> Vec<Range<usize>> {
    assert!(target_len >= 1, "target_len must be positive");
    if n_tokens < MIN_SEGMENT_TOKENS {
        return std::iter::once(0..n_tokens).collect();
    }
    let full = n_tokens / target_len;
    let mut spans: Vec<Range<usize>> = (0..full).map(|i| i * target_len..(i + 1) * target_len).collect();
    let rem_start = full * target_len;
    if rem_start < n_tokens {
        match spans.last_mut() {
            Some(last) if n_tokens - rem_start < MIN_SEGMENT_TOKENS => last.end = n_tokens,
            _ => spans.push(rem_start..n_tokens),
        }
    }
    spans
}

/// Tokenizes one document and returns its segment spans.
pub fn segment_document(doc: &Document, tokenizer: &Tokenizer, target_len: usize) -> (Vec<u32>, Vec<Range<usize>>) {
    let tokens = tokenizer.tokenize(&doc.text);
    let spans = segment_tokens(tokens.len(), target_len);
    (tokens, spans)
}

/// Every document tokenized once, with its segment spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedCorpus {
    ids: Vec<String>,
    tokens: Vec<Vec<u32>>,
    segments: Vec<Vec<Range<usize>>>,
    target_len: usize,
}

impl TokenizedCorpus {
    pub fn build(corpus: &Corpus, tokenizer: &Tokenizer, target_len: usize) -> Result<Self> {
        if target_len == 0 {
            return Err(Error::Config("segment target length must be at least 1".into()));
        }
        let (tokens, segments) = corpus
            .documents()
            .par_iter()
            .map(|doc| segment_document(doc, tokenizer, target_len))
            .unzip();
        Ok(TokenizedCorpus {
            ids: corpus.iter().map(|d| d.id.clone()).collect(),
            tokens,
            segments,
            target_len,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn id(&self, doc: usize) -> &str {
        &self.ids[doc]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn tokens(&self, doc: usize) -> &[u32] {
        &self.tokens[doc]
    }

    pub fn segments(&self, doc: usize) -> &[Range<usize>] {
        &self.segments[doc]
    }

    pub fn span_tokens(&self, doc: usize, span: &Range<usize>) -> &[u32] {
        &self.tokens[doc][span.clone()]
    }
}
