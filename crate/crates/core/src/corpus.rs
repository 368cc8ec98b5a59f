//! Line-delimited corpus ingestion.
//!
//! Each line of a corpus file is a flat JSON object:
//!
//! ```text
//! {"id": "Tidal_Basin", "title": "Tidal Basin", "text": "...", "links": ["Cherry_blossom"]}
//! ```
//!
//! Self-links and repeated outlinks are removed on load. Links to ids that are
//! not part of the corpus are kept here and only dropped when a graph is built.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// One corpus unit: identity, text and outgoing link targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub text: String,
    #[serde(rename = "links")]
    pub outlinks: Vec<String>,
}

/// Counters collected while reading a corpus file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub documents: usize,
    pub self_links_dropped: usize,
    pub duplicate_links_dropped: usize,
    pub unknown_keys: usize,
    pub blank_lines: usize,
}

/// An ordered, immutable set of documents with an id index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    id_index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus from already-validated documents.
    ///
    /// Outlinks are cleaned the same way `load_corpus` cleans them; ids must be
    /// unique and nonempty.
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut report = LoadReport::default();
        let mut out = Corpus::default();
        for (pos, mut doc) in documents.into_iter().enumerate() {
            doc.text = normalize_whitespace(&doc.text);
            validate(&doc).map_err(|m| Error::malformed(pos + 1, m))?;
            clean_outlinks(&mut doc, &mut report);
            if let Some(&first) = out.id_index.get(&doc.id) {
                return Err(Error::DuplicateId {
                    id: doc.id,
                    first: first + 1,
                    second: pos + 1,
                });
            }
            out.id_index.insert(doc.id.clone(), out.documents.len());
            out.documents.push(doc);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn get(&self, pos: usize) -> Option<&Document> {
        self.documents.get(pos)
    }

    /// Position of `id` in file order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.id_index.get(id).copied()
    }

    pub fn by_id(&self, id: &str) -> Option<&Document> {
        self.position(id).map(|p| &self.documents[p])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// True when no document carries any outlink.
    pub fn is_linkless(&self) -> bool {
        self.documents.iter().all(|d| d.outlinks.is_empty())
    }

    /// Writes the corpus back out in the line-delimited schema.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut out, doc).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

/// Reads a corpus file from disk.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<(Corpus, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file))
}

/// Reads a corpus from any buffered reader. Line numbers in errors are 1-based.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<(Corpus, LoadReport)> {
    let mut report = LoadReport::default();
    let mut documents = Vec::new();
    let mut id_index: HashMap<String, usize> = HashMap::new();
    // line number of each document, for duplicate-id diagnostics
    let mut lines_of = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            report.blank_lines += 1;
            continue;
        }
        let mut doc = parse_record(&line, &mut report).map_err(|m| Error::malformed(line_no, m))?;
        validate(&doc).map_err(|m| Error::malformed(line_no, m))?;
        clean_outlinks(&mut doc, &mut report);

        if let Some(&first) = id_index.get(&doc.id) {
            return Err(Error::DuplicateId {
                id: doc.id,
                first: lines_of[first],
                second: line_no,
            });
        }
        id_index.insert(doc.id.clone(), documents.len());
        lines_of.push(line_no);
        documents.push(doc);
    }

    if report.unknown_keys > 0 {
        log::warn!("ignored {} unknown record key(s)", report.unknown_keys);
    }
    report.documents = documents.len();
    Ok((
        Corpus {
            documents,
            id_index,
        },
        report,
    ))
}

fn parse_record(line: &str, report: &mut LoadReport) -> Result<Document, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(mut obj) = value else {
        return Err("record is not a JSON object".into());
    };

    let id = take_string(&mut obj, "id")?.ok_or("missing key \"id\"")?;
    let text = take_string(&mut obj, "text")?.ok_or("missing key \"text\"")?;
    let title = take_string(&mut obj, "title")?.unwrap_or_default();
    let outlinks = match obj.remove("links") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                other => Err(format!("link target must be a string, got {other}")),
            })
            .collect::<Result<_, _>>()?,
        Some(other) => return Err(format!("\"links\" must be an array, got {other}")),
    };
    report.unknown_keys += obj.len();

    Ok(Document {
        id,
        title,
        text: normalize_whitespace(&text),
        outlinks,
    })
}

fn take_string(obj: &mut Map<String, Value>, key: &str) -> Result<Option<String>, String> {
    match obj.remove(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(format!("{key:?} must be a string, got {other}")),
    }
}

fn validate(doc: &Document) -> Result<(), String> {
    if doc.id.is_empty() {
        return Err("empty document id".into());
    }
    if doc.text.is_empty() {
        return Err(format!("document {:?} has empty text", doc.id));
    }
    Ok(())
}

fn clean_outlinks(doc: &mut Document, report: &mut LoadReport) {
    let mut seen = HashSet::with_capacity(doc.outlinks.len());
    let own = doc.id.as_str();
    doc.outlinks.retain(|target| {
        if target == own {
            report.self_links_dropped += 1;
            false
        } else if !seen.insert(target.clone()) {
            report.duplicate_links_dropped += 1;
            false
        } else {
            true
        }
    });
}

/// Collapses every run of whitespace into one space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
