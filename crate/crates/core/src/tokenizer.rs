//! WordPiece tokenization against a BERT-style `vocab.txt`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

pub const CONTINUATION_PREFIX: &str = "##";
/// Words longer than this many characters become `[UNK]` without matching.
pub const MAX_WORD_CHARS: usize = 100;

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialIds {
    pub pad: u32,
    pub unk: u32,
    pub cls: u32,
    pub sep: u32,
    pub mask: u32,
}

impl SpecialIds {
    pub fn contains(&self, id: u32) -> bool {
        [self.pad, self.unk, self.cls, self.sep, self.mask].contains(&id)
    }
}

/// Token strings with dense ids `0..V`, id = zero-based line of the vocab file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    token_to_id: HashMap<String, u32>,
    specials: SpecialIds,
    /// Ids that are not one of the five special tokens, ascending.
    ordinary: Vec<u32>,
}

impl Vocabulary {
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let mut token_to_id = HashMap::with_capacity(tokens.len());
        for (id, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::malformed(id + 1, "empty vocabulary token"));
            }
            if let Some(first) = token_to_id.insert(tok.clone(), id as u32) {
                return Err(Error::DuplicateToken {
                    token: tok.clone(),
                    first: first as usize + 1,
                    line: id + 1,
                });
            }
        }
        let find = |name: &'static str| token_to_id.get(name).copied().ok_or(Error::MissingSpecial(name));
        let specials = SpecialIds {
            pad: find(PAD)?,
            unk: find(UNK)?,
            cls: find(CLS)?,
            sep: find(SEP)?,
            mask: find(MASK)?,
        };
        let ordinary = (0..tokens.len() as u32).filter(|&id| !specials.contains(id)).collect();
        Ok(Vocabulary {
            tokens,
            token_to_id,
            specials,
            ordinary,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn specials(&self) -> SpecialIds {
        self.specials
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Non-special ids, the pool for random MLM replacements.
    pub fn ordinary_ids(&self) -> &[u32] {
        &self.ordinary
    }
}

/// Reads a vocab file, one token per line, trailing `\r` ignored.
pub fn load_vocab(path: impl AsRef<Path>) -> Result<Vocabulary> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_vocab(BufReader::new(file))
}

pub fn read_vocab<R: BufRead>(reader: R) -> Result<Vocabulary> {
    let mut tokens = Vec::new();
    for line in reader.lines() {
        let line = line?;
        tokens.push(line.strip_suffix('\r').map(str::to_owned).unwrap_or(line));
    }
    Vocabulary::from_tokens(tokens)
}

#[derive(Debug, Clone)]
pub struct Tokenizer {
    vocab: Vocabulary,
    lowercase: bool,
}

impl Tokenizer {
    pub fn new(vocab: Vocabulary) -> Self {
        Tokenizer { vocab, lowercase: true }
    }

    pub fn with_lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    pub fn tokenize(&self, text: &str) -> Vec<u32> {
        let mut ids = Vec::new();
        self.tokenize_into(text, &mut ids);
        ids
    }

    pub fn tokenize_into(&self, text: &str, ids: &mut Vec<u32>) {
        let text = if self.lowercase {
            std::borrow::Cow::Owned(text.to_lowercase())
        } else {
            std::borrow::Cow::Borrowed(text)
        };
        for word in split_words(&text) {
            wordpiece(word, &self.vocab, ids);
        }
    }
}

/// Lowercasing WordPiece tokenization of `text`.
pub fn tokenize(text: &str, vocab: &Vocabulary) -> Vec<u32> {
    let mut ids = Vec::new();
    for word in split_words(&text.to_lowercase()) {
        wordpiece(word, vocab, &mut ids);
    }
    ids
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '\u{2010}'..='\u{205E}' | '\u{3001}'..='\u{303F}' | '\u{00A1}' | '\u{00BF}')
}

/// Whitespace-separated words with every punctuation character split off as
/// its own word.
fn split_words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace().flat_map(|chunk| {
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, c) in chunk.char_indices() {
            if is_punctuation(c) {
                if start < i {
                    pieces.push(&chunk[start..i]);
                }
                pieces.push(&chunk[i..i + c.len_utf8()]);
                start = i + c.len_utf8();
            }
        }
        if start < chunk.len() {
            pieces.push(&chunk[start..]);
        }
        pieces
    })
}

/// Greedy longest-match-first split of one word.
fn wordpiece(word: &str, vocab: &Vocabulary, out: &mut Vec<u32>) {
    let unk = vocab.specials.unk;
    let bounds: Vec<usize> = word.char_indices().map(|(i, _)| i).chain([word.len()]).collect();
    let n_chars = bounds.len() - 1;
    if n_chars > MAX_WORD_CHARS {
        out.push(unk);
        return;
    }
    let mark = out.len();
    let mut candidate = String::with_capacity(word.len() + CONTINUATION_PREFIX.len());
    let mut start = 0;
    while start < n_chars {
        let mut end = n_chars;
        let mut found = None;
        while end > start {
            candidate.clear();
            if start > 0 {
                candidate.push_str(CONTINUATION_PREFIX);
            }
            candidate.push_str(&word[bounds[start]..bounds[end]]);
            if let Some(id) = vocab.id(&candidate) {
                found = Some(id);
                break;
            }
            end -= 1;
        }
        match found {
            Some(id) => {
                out.push(id);
                start = end;
            }
            None => {
                out.truncate(mark);
                out.push(unk);
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(extra: &[&str]) -> Vocabulary {
        let mut toks = vec![PAD, UNK, CLS, SEP, MASK];
        toks.extend_from_slice(extra);
        Vocabulary::from_tokens(toks).unwrap()
    }

    #[test]
    fn ten_line_vocab() {
        let text = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\nthe\ncat\n##s\nsat\n.\n";
        let v = read_vocab(text.as_bytes()).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v.specials().mask, 4);
        assert_eq!(v.id("##s"), Some(7));
        assert_eq!(v.ordinary_ids(), &[5, 6, 7, 8, 9]);
    }

    #[test]
    fn missing_mask_is_an_error() {
        let err = read_vocab("[PAD]\n[UNK]\n[CLS]\n[SEP]\nthe\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingSpecial("[MASK]")));
        assert!(matches!(read_vocab("".as_bytes()), Err(Error::MissingSpecial(_))));
    }

    #[test]
    fn duplicate_token_is_an_error() {
        let err = read_vocab("[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\na\na\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateToken { first: 6, line: 7, .. }));
    }

    #[test]
    fn crlf_lines() {
        let v = read_vocab("[PAD]\r\n[UNK]\r\n[CLS]\r\n[SEP]\r\n[MASK]\r\nx\r\n".as_bytes()).unwrap();
        assert_eq!(v.id("x"), Some(5));
    }

    #[test]
    fn whole_word_match() {
        let v = vocab(&["hello", "hell", "##o"]);
        assert_eq!(tokenize("hello", &v), vec![5]);
    }

    #[test]
    fn continuation_pieces() {
        // abc against {a, ##b, ##c}: "abc","ab" miss, "a" hits; then "##bc" misses, "##b" hits; "##c"
        let v = vocab(&["a", "##b", "##c"]);
        assert_eq!(tokenize("abc", &v), vec![5, 6, 7]);
    }

    #[test]
    fn unmatched_word_is_unk() {
        let v = vocab(&["a", "##b"]);
        assert_eq!(tokenize("xyz", &v), vec![1]);
        // partial match then dead end collapses to a single [UNK]
        assert_eq!(tokenize("abz", &v), vec![1]);
        let long = "a".repeat(MAX_WORD_CHARS + 1);
        let v = vocab(&["a", "##a"]);
        assert_eq!(tokenize(&long, &v), vec![1]);
        assert_eq!(tokenize(&"a".repeat(MAX_WORD_CHARS), &v).len(), MAX_WORD_CHARS);
    }

    #[test]
    fn punctuation_and_case() {
        let v = vocab(&["the", "cat", ",", "!", "The"]);
        assert_eq!(tokenize("The cat, the cat!", &v), vec![5, 6, 7, 5, 6, 8]);
        let t = Tokenizer::new(v).with_lowercase(false);
        assert_eq!(t.tokenize("The cat"), vec![9, 6]);
    }

    #[test]
    fn bracketed_specials_are_not_matched() {
        let v = vocab(&["[", "]", "mask", "sep"]);
        let ids = tokenize("[MASK] [SEP]", &v);
        assert!(ids.iter().all(|&id| !v.specials().contains(id) || id == v.specials().unk));
        assert_eq!(ids, vec![5, 7, 6, 5, 8, 6]);
    }
}
