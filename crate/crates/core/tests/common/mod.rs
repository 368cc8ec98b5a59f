#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use linkpack::tokenizer::SpecialIds;
use linkpack::{read_corpus, Corpus, DocumentGraph, Relation, TrainingInstance, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub mod oracle;

pub const WORDS: usize = 400;

/// Vocabulary with the specials scattered among ordinary words.
pub fn vocab_tokens() -> Vec<String> {
    let mut toks = vec!["[PAD]".to_string()];
    toks.extend((0..50).map(|i| format!("w{i}")));
    toks.extend(["[UNK]", "[CLS]", "[SEP]", "[MASK]"].map(String::from));
    toks.extend((50..WORDS).map(|i| format!("w{i}")));
    toks.extend(["##s", "##ing", ".", ","].map(String::from));
    toks
}

pub fn vocab() -> Vocabulary {
    Vocabulary::from_tokens(vocab_tokens()).unwrap()
}

pub fn write_vocab(dir: &Path) -> PathBuf {
    let path = dir.join("vocab.txt");
    std::fs::write(&path, vocab_tokens().join("\n") + "\n").unwrap();
    path
}

fn words(rng: &mut ChaCha8Rng, n: usize, pool: usize) -> String {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let w = rng.random_range(0..pool);
        match rng.random_range(0..20) {
            0 => out.push(format!("w{w}s")),
            1 => out.push(format!("w{w}.")),
            _ => out.push(format!("w{w}")),
        }
    }
    out.join(" ")
}

/// Corpus records where every document links to 2..=6 others and lengths
/// span one to several segments at the default packing budget.
pub fn link_rich_records(n_docs: usize, seed: u64) -> Vec<serde_json::Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|d| {
            let len = rng.random_range(20..900);
            let n_links = rng.random_range(2..=6).min(n_docs - 1);
            let mut links = Vec::new();
            while links.len() < n_links {
                let t = rng.random_range(0..n_docs);
                if t != d && !links.contains(&t) {
                    links.push(t);
                }
            }
            json!({
                "id": format!("doc{d:05}"),
                "title": format!("Document {d}"),
                "text": words(&mut rng, len, WORDS),
                "links": links.iter().map(|t| format!("doc{t:05}")).collect::<Vec<_>>(),
            })
        })
        .collect()
}

pub fn linkless_records(n_docs: usize, seed: u64) -> Vec<serde_json::Value> {
    link_rich_records(n_docs, seed)
        .into_iter()
        .map(|mut r| {
            r["links"] = json!([]);
            r
        })
        .collect()
}

/// Small-vocabulary documents with exact duplicates, so similarity ties occur.
pub fn tfidf_records(n_docs: usize, seed: u64) -> Vec<serde_json::Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut texts: Vec<String> = Vec::new();
    for d in 0..n_docs {
        let text = if d > 3 && rng.random_range(0..6) == 0 {
            texts[rng.random_range(0..texts.len())].clone()
        } else if rng.random_range(0..25) == 0 {
            "... !!!".to_string()
        } else {
            let len = rng.random_range(1..30);
            words(&mut rng, len, 40)
        };
        texts.push(text);
    }
    // ids deliberately not in file order
    texts
        .into_iter()
        .enumerate()
        .map(|(d, t)| json!({"id": format!("t{:03}", (d * 37) % 1000), "title": "", "text": t, "links": []}))
        .collect()
}

pub fn to_jsonl(records: &[serde_json::Value]) -> String {
    records.iter().map(|r| r.to_string() + "\n").collect()
}

pub fn corpus_of(records: &[serde_json::Value]) -> Corpus {
    read_corpus(to_jsonl(records).as_bytes()).unwrap().0
}

pub fn write_corpus(dir: &Path, name: &str, records: &[serde_json::Value]) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, to_jsonl(records)).unwrap();
    path
}

/// Round-half-up of 15% with a floor of one, computed in integers.
pub fn expected_masks(maskable: usize) -> usize {
    if maskable == 0 {
        0
    } else {
        ((maskable * 15 + 50) / 100).max(1)
    }
}

/// Every structural invariant of one instance record; the graph check applies
/// when `graph` is given.
pub fn check_instance(
    inst: &TrainingInstance,
    sp: SpecialIds,
    max_len: usize,
    graph: Option<&DocumentGraph>,
) -> Result<(), String> {
    let toks = &inst.token_ids;
    let n = toks.len();
    if n > max_len {
        return Err(format!("length {n} > {max_len}"));
    }
    if toks.first() != Some(&sp.cls) || toks.iter().filter(|&&t| t == sp.cls).count() != 1 {
        return Err("needs exactly one [CLS], at position 0".into());
    }
    let seps: Vec<usize> = toks.iter().enumerate().filter(|(_, &t)| t == sp.sep).map(|(i, _)| i).collect();
    if seps.len() != 2 || seps[1] != n - 1 || seps[0] < 2 || seps[0] + 2 > seps[1] {
        return Err(format!("bad [SEP] layout {seps:?} in length {n}"));
    }
    if toks.contains(&sp.pad) {
        return Err("[PAD] inside instance".into());
    }
    let want_types: Vec<u8> = (0..n).map(|i| if i <= seps[0] { 0 } else { 1 }).collect();
    if inst.type_ids != want_types {
        return Err("type id pattern".into());
    }
    let pos = &inst.mlm_positions;
    if pos.len() != inst.mlm_labels.len() || pos.windows(2).any(|w| w[0] >= w[1]) {
        return Err("mlm positions not strictly increasing / label count mismatch".into());
    }
    if pos.iter().any(|&p| p == 0 || p as usize >= n - 1 || p as usize == seps[0]) {
        return Err("mlm position on a special".into());
    }
    if pos.len() != expected_masks(n - 3) {
        return Err(format!("{} masks for {} maskable", pos.len(), n - 3));
    }
    for (&p, &l) in pos.iter().zip(&inst.mlm_labels) {
        if [sp.cls, sp.sep, sp.mask, sp.pad].contains(&l) {
            return Err("label is a structural special".into());
        }
        if toks[p as usize] != l && toks[p as usize] != sp.mask && [sp.cls, sp.sep, sp.pad, sp.unk].contains(&toks[p as usize]) {
            return Err("random replacement with a special id".into());
        }
    }
    // unmasked positions carry no [MASK]
    let masked: HashSet<usize> = pos.iter().map(|&p| p as usize).collect();
    if (0..n).any(|i| toks[i] == sp.mask && !masked.contains(&i)) {
        return Err("[MASK] outside mlm positions".into());
    }
    let expected_label = match inst.option {
        Relation::Contiguous => 0,
        Relation::Random => 1,
        Relation::Linked => 2,
    };
    if inst.drp_label != expected_label {
        return Err("drp label / option mismatch".into());
    }
    match inst.option {
        Relation::Contiguous if inst.anchor_doc != inst.partner_doc => return Err("contiguous across docs".into()),
        Relation::Random if inst.anchor_doc == inst.partner_doc => return Err("random within one doc".into()),
        Relation::Linked => {
            if let Some(g) = graph {
                let ids = g.node_ids();
                let a = ids.iter().position(|x| *x == inst.anchor_doc).ok_or("unknown anchor")?;
                let b = ids.iter().position(|x| *x == inst.partner_doc).ok_or("unknown partner")?;
                if !g.has_edge(a, b) {
                    return Err("linked pair is not an edge".into());
                }
            }
        }
        _ => {}
    }
    Ok(())
}
