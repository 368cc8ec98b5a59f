//! Python bindings for `linkpack`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use linkpack::graph::{build_hyperlink_graph, build_random_graph, build_tfidf_graph, fit_tfidf};
use linkpack::instance::{default_target_len, read_instances, InstanceGenerator};
use linkpack::stats::{graph_stats as summarize_graph, summarize_stream};
use linkpack::{Corpus, DocumentGraph, EdgeMode, MixConfig, TokenizedCorpus, TrainingInstance};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: linkpack::Error) -> PyErr {
    match e {
        linkpack::Error::Io { .. } | linkpack::Error::Stream(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A loaded corpus of documents.
#[pyclass(name = "Corpus", module = "linkpack_py", frozen)]
struct PyCorpus {
    inner: Corpus,
}

#[pymethods]
impl PyCorpus {
    /// Load a line-delimited JSON corpus file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let (inner, _) = linkpack::load_corpus(path).map_err(err)?;
        Ok(PyCorpus { inner })
    }

    /// Parse corpus records from a string of JSON lines.
    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<Self> {
        let (inner, _) = linkpack::read_corpus(text.as_bytes()).map_err(err)?;
        Ok(PyCorpus { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.iter().map(|d| d.id.clone()).collect()
    }

    /// `(id, title, text, links)` of the document at `pos`.
    fn document(&self, pos: usize) -> PyResult<(String, String, String, Vec<String>)> {
        let d = self
            .inner
            .get(pos)
            .ok_or_else(|| PyValueError::new_err(format!("no document at position {pos}")))?;
        Ok((d.id.clone(), d.title.clone(), d.text.clone(), d.outlinks.clone()))
    }

    fn to_jsonl(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_jsonl(&mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("corpus serializes to utf-8"))
    }

    fn __repr__(&self) -> String {
        format!("Corpus(documents={})", self.inner.len())
    }
}

/// WordPiece vocabulary.
#[pyclass(name = "Vocabulary", module = "linkpack_py", frozen)]
struct PyVocabulary {
    inner: linkpack::Vocabulary,
}

#[pymethods]
impl PyVocabulary {
    #[new]
    fn new(tokens: Vec<String>) -> PyResult<Self> {
        Ok(PyVocabulary { inner: linkpack::Vocabulary::from_tokens(tokens).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyVocabulary { inner: linkpack::load_vocab(path).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn id(&self, token: &str) -> Option<u32> {
        self.inner.id(token)
    }

    fn token(&self, id: u32) -> Option<String> {
        self.inner.token(id).map(str::to_owned)
    }

    fn special_ids<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let sp = self.inner.specials();
        let d = PyDict::new(py);
        d.set_item("pad", sp.pad)?;
        d.set_item("unk", sp.unk)?;
        d.set_item("cls", sp.cls)?;
        d.set_item("sep", sp.sep)?;
        d.set_item("mask", sp.mask)?;
        Ok(d)
    }

    #[pyo3(signature = (text, lowercase = true))]
    fn tokenize(&self, text: &str, lowercase: bool) -> Vec<u32> {
        linkpack::Tokenizer::new(self.inner.clone()).with_lowercase(lowercase).tokenize(text)
    }
}

/// Directed document graph over a corpus.
#[pyclass(name = "DocumentGraph", module = "linkpack_py", frozen)]
struct PyGraph {
    inner: DocumentGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn hyperlink(corpus: &PyCorpus) -> Self {
        PyGraph { inner: build_hyperlink_graph(&corpus.inner).0 }
    }

    #[staticmethod]
    #[pyo3(signature = (corpus, k = 5))]
    fn tfidf(py: Python<'_>, corpus: &PyCorpus, k: usize) -> PyResult<Self> {
        let inner = py
            .detach(|| {
                let (model, _) = fit_tfidf(&corpus.inner);
                build_tfidf_graph(&corpus.inner, &model, k)
            })
            .map_err(err)?
            .0;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (corpus, out_degree = 5, seed = 0))]
    fn random(corpus: &PyCorpus, out_degree: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGraph { inner: build_random_graph(&corpus.inner, out_degree, seed).map_err(err)?.0 })
    }

    /// Read a TSV edge list written by `write_tsv` or the CLI.
    #[staticmethod]
    fn read_tsv(path: &str, corpus: &PyCorpus) -> PyResult<Self> {
        let f = File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        Ok(PyGraph { inner: DocumentGraph::read_tsv(BufReader::new(f), &corpus.inner).map_err(err)? })
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().as_str()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn successors(&self, node: usize) -> PyResult<Vec<u32>> {
        if node >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(self.inner.successors(node).to_vec())
    }

    fn in_degrees(&self) -> Vec<u32> {
        self.inner.in_degrees().to_vec()
    }

    /// Edges as `(source id, target id)` pairs in node order.
    fn edges(&self) -> Vec<(String, String)> {
        self.inner
            .edges()
            .map(|(a, b)| (self.inner.node_id(a).to_owned(), self.inner.node_id(b).to_owned()))
            .collect()
    }

    fn to_tsv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_tsv(&mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("graph serializes to utf-8"))
    }

    fn write_tsv(&self, path: &str) -> PyResult<()> {
        let f = File::create(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let mut out = BufWriter::new(f);
        self.inner.write_tsv(&mut out).map_err(err)?;
        out.flush()?;
        Ok(())
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = serde_json::to_string(&summarize_graph(&self.inner)).expect("summary serializes");
        json_to_py(py, &text)
    }

    fn __repr__(&self) -> String {
        format!(
            "DocumentGraph(mode={}, nodes={}, edges={})",
            self.inner.mode(),
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn generate(
    py: Python<'_>,
    corpus: &PyCorpus,
    vocab: &PyVocabulary,
    graph: Option<&PyGraph>,
    count: u64,
    seed: u64,
    max_seq_len: usize,
    mix: (f64, f64, f64),
    target_len: Option<usize>,
    lowercase: bool,
) -> PyResult<Vec<TrainingInstance>> {
    let mix = MixConfig::from_weights([mix.0, mix.1, mix.2])
        .map_err(err)?
        .with_seed(seed)
        .with_max_seq_len(max_seq_len);
    mix.validate().map_err(err)?;
    let empty;
    let graph = match graph {
        Some(g) => &g.inner,
        None => {
            empty = DocumentGraph::empty(&corpus.inner, EdgeMode::Hyperlink);
            &empty
        }
    };
    py.detach(|| {
        let tokenizer = linkpack::Tokenizer::new(vocab.inner.clone()).with_lowercase(lowercase);
        let target = target_len.unwrap_or_else(|| default_target_len(max_seq_len));
        let tc = TokenizedCorpus::build(&corpus.inner, &tokenizer, target)?;
        let generator = InstanceGenerator::new(&tc, graph, tokenizer.vocab(), &mix)?;
        Ok::<_, linkpack::Error>(generator.generate(0..count)?.0)
    })
    .map_err(err)
}

/// Generate `count` instances as dicts with the canonical record keys.
#[pyfunction]
#[pyo3(signature = (corpus, vocab, count, graph = None, seed = 0, max_seq_len = 512, mix = (1.0, 1.0, 1.0), target_len = None, lowercase = true))]
#[allow(clippy::too_many_arguments)]
fn generate_instances<'py>(
    py: Python<'py>,
    corpus: &PyCorpus,
    vocab: &PyVocabulary,
    count: u64,
    graph: Option<&PyGraph>,
    seed: u64,
    max_seq_len: usize,
    mix: (f64, f64, f64),
    target_len: Option<usize>,
    lowercase: bool,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let stream = generate(py, corpus, vocab, graph, count, seed, max_seq_len, mix, target_len, lowercase)?;
    stream.iter().map(|inst| json_to_py(py, &inst.to_json_line())).collect()
}

/// Same as `generate_instances`, serialized as JSON lines.
#[pyfunction]
#[pyo3(signature = (corpus, vocab, count, graph = None, seed = 0, max_seq_len = 512, mix = (1.0, 1.0, 1.0), target_len = None, lowercase = true))]
#[allow(clippy::too_many_arguments)]
fn generate_jsonl(
    py: Python<'_>,
    corpus: &PyCorpus,
    vocab: &PyVocabulary,
    count: u64,
    graph: Option<&PyGraph>,
    seed: u64,
    max_seq_len: usize,
    mix: (f64, f64, f64),
    target_len: Option<usize>,
    lowercase: bool,
) -> PyResult<String> {
    let stream = generate(py, corpus, vocab, graph, count, seed, max_seq_len, mix, target_len, lowercase)?;
    let mut out = String::new();
    for inst in &stream {
        out.push_str(&inst.to_json_line());
        out.push('\n');
    }
    Ok(out)
}

/// Summary statistics of a JSON-lines instance stream.
#[pyfunction]
#[pyo3(signature = (jsonl, mask_id = None, graph = None))]
fn stream_stats<'py>(py: Python<'py>, jsonl: &str, mask_id: Option<u32>, graph: Option<&PyGraph>) -> PyResult<Bound<'py, PyAny>> {
    let stats = summarize_stream(read_instances(jsonl.as_bytes()), mask_id, graph.map(|g| &g.inner)).map_err(err)?;
    json_to_py(py, &serde_json::to_string(&stats).expect("stats serialize"))
}

/// Run the command-line interface in-process; returns the exit code.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    py.detach(|| linkpack::cli::run(std::iter::once("linkpack".to_string()).chain(args)))
}

#[pymodule]
fn linkpack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyVocabulary>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(generate_instances, m)?)?;
    m.add_function(wrap_pyfunction!(generate_jsonl, m)?)?;
    m.add_function(wrap_pyfunction!(stream_stats, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
