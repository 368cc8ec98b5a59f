//! Pretraining instances from linked documents.
//!
//! The pipeline reads a line-delimited corpus, builds a directed document
//! graph (hyperlinks, TF-IDF nearest neighbors, or random edges), and emits
//! `[CLS] A [SEP] B [SEP]` instances whose second segment is contiguous with,
//! random to, or linked from the first. Linked partners are drawn with
//! probability inversely proportional to their in-degree. Each instance is
//! MLM-masked and carries its relation label.
//!
//! ```no_run
//! use linkpack::{corpus, graph, instance, tokenizer};
//!
//! let (corpus, _) = corpus::load_corpus("wiki.jsonl")?;
//! let (graph, _) = graph::build_hyperlink_graph(&corpus);
//! let tok = tokenizer::Tokenizer::new(tokenizer::load_vocab("vocab.txt")?);
//! let mix = instance::MixConfig::default();
//! let tc = instance::TokenizedCorpus::build(&corpus, &tok, instance::default_target_len(mix.max_seq_len))?;
//! let (instances, _) = instance::generate_stream(&tc, &graph, tok.vocab(), &mix, 1000)?;
//! # Ok::<(), linkpack::Error>(())
//! ```

pub mod cli;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod instance;
pub mod rng;
pub mod stats;
pub mod tokenizer;

pub use corpus::{load_corpus, read_corpus, Corpus, Document, LoadReport};
pub use error::{Error, Result};
pub use graph::{DocumentGraph, EdgeMode, GraphReport, TfIdfModel};
pub use instance::{MixConfig, Relation, SegmentPair, TokenizedCorpus, TrainingInstance};
pub use tokenizer::{load_vocab, Tokenizer, Vocabulary};
