//! `linkpack` command line: `build-graph`, `make-instances`, `stats`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::corpus::{load_corpus, Corpus};
use crate::error::{Error, Result};
use crate::graph::{build_hyperlink_graph, build_random_graph, build_tfidf_graph, fit_tfidf, DocumentGraph, EdgeMode};
use crate::instance::{default_target_len, read_instances, InstanceGenerator, MixConfig, TokenizedCorpus};
use crate::stats::{graph_stats, summarize_stream};
use crate::tokenizer::{load_vocab, Tokenizer};

#[derive(Debug, Parser)]
#[command(name = "linkpack", version, about = "Build document graphs and linked-document pretraining instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a document graph and write it as TSV.
    BuildGraph(BuildGraphArgs),
    /// Generate masked, relation-labelled training instances.
    MakeInstances(MakeInstancesArgs),
    /// Summarize an instance stream and/or a graph as JSON on stdout.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hyperlink,
    Tfidf,
    Random,
}

#[derive(Debug, Args)]
pub struct BuildGraphArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Line-delimited corpus file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output graph file, `-` for stdout.
    #[arg(long)]
    pub out: PathBuf,
    /// Neighbors per document in tfidf mode.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Successors per document in random mode.
    #[arg(long, default_value_t = 5)]
    pub out_degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = one per core). Never changes the output.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct MakeInstancesArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// BERT-style vocab file, one token per line.
    #[arg(long)]
    pub vocab: PathBuf,
    /// Graph file from `build-graph`; without it the corpus is treated as linkless.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Output instance file, `-` for stdout.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 512)]
    pub max_seq_len: usize,
    /// Contiguous,random,linked weights, normalized to sum to 1.
    #[arg(long, default_value = "1,1,1", value_parser = parse_mix)]
    pub mix: [f64; 3],
    /// Segment length in tokens [default: (max_seq_len - 3) / 2].
    #[arg(long)]
    pub target_len: Option<usize>,
    /// Keep case when tokenizing.
    #[arg(long)]
    pub no_lowercase: bool,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Instance file, `-` for stdin.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Vocab file; identifies `[MASK]` for the replacement split.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Graph file to summarize; requires --corpus.
    #[arg(long, requires = "corpus")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

fn parse_mix(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("expected three comma-separated weights, got {s:?}"));
    };
    let parse = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let w = [parse(a)?, parse(b)?, parse(c)?];
    MixConfig::from_weights(w).map_err(|e| e.to_string())?;
    Ok(w)
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("error: invalid arguments"));
            return 2;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildGraph(args) => with_workers(args.workers, || build_graph(&args)),
        Command::MakeInstances(args) => with_workers(args.workers, || make_instances(&args)),
        Command::Stats(args) => stats(&args),
    }
}

fn with_workers<F: FnOnce() -> Result<()> + Send>(workers: usize, f: F) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn effective_config(value: serde_json::Value) {
    eprintln!("effective-config: {value}");
}

fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn load(path: &Path) -> Result<Corpus> {
    let (corpus, report) = load_corpus(path)?;
    eprintln!(
        "loaded {} document(s) from {} ({} self-link(s), {} duplicate link(s) dropped, {} unknown key(s))",
        report.documents,
        path.display(),
        report.self_links_dropped,
        report.duplicate_links_dropped,
        report.unknown_keys
    );
    Ok(corpus)
}

fn read_graph(path: &Path, corpus: &Corpus) -> Result<DocumentGraph> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    DocumentGraph::read_tsv(BufReader::new(f), corpus).map_err(|e| match e {
        Error::Malformed { line, message } => Error::Config(format!("{}: line {line}: {message}", path.display())),
        other => other,
    })
}

fn build_graph(args: &BuildGraphArgs) -> Result<()> {
    let mode = match args.mode {
        ModeArg::Hyperlink => EdgeMode::Hyperlink,
        ModeArg::Tfidf => EdgeMode::Tfidf,
        ModeArg::Random => EdgeMode::Random,
    };
    effective_config(json!({
        "command": "build-graph",
        "mode": mode,
        "corpus": args.corpus,
        "out": args.out,
        "k": args.k,
        "out_degree": args.out_degree,
        "seed": args.seed,
        "workers": args.workers,
    }));
    let corpus = load(&args.corpus)?;
    let (graph, report) = match mode {
        EdgeMode::Hyperlink => build_hyperlink_graph(&corpus),
        EdgeMode::Tfidf => {
            if corpus.is_empty() {
                return Err(Error::Config("tfidf mode needs a nonempty corpus".into()));
            }
            let (model, _) = fit_tfidf(&corpus);
            build_tfidf_graph(&corpus, &model, args.k)?
        }
        EdgeMode::Random => build_random_graph(&corpus, args.out_degree, args.seed)?,
    };
    let mut out = open_out(&args.out)?;
    graph.write_tsv(&mut out)?;
    out.flush()?;
    eprintln!(
        "wrote {} node(s), {} edge(s); {} dangling link(s), {} empty document(s){}",
        graph.node_count(),
        graph.edge_count(),
        report.dangling_links,
        report.empty_documents,
        report
            .clamped_out_degree
            .map(|d| format!(", out-degree clamped to {d}"))
            .unwrap_or_default()
    );
    Ok(())
}

fn make_instances(args: &MakeInstancesArgs) -> Result<()> {
    let mix = MixConfig::from_weights(args.mix)?
        .with_seed(args.seed)
        .with_max_seq_len(args.max_seq_len);
    mix.validate()?;
    let target_len = args.target_len.unwrap_or_else(|| default_target_len(mix.max_seq_len));
    effective_config(json!({
        "command": "make-instances",
        "corpus": args.corpus,
        "vocab": args.vocab,
        "graph": args.graph,
        "out": args.out,
        "count": args.count,
        "seed": mix.seed,
        "max_seq_len": mix.max_seq_len,
        "mix": mix.probabilities(),
        "target_len": target_len,
        "lowercase": !args.no_lowercase,
        "mask": mix.mask,
        "workers": args.workers,
    }));

    let corpus = load(&args.corpus)?;
    let vocab = load_vocab(&args.vocab)?;
    let graph = match &args.graph {
        Some(p) => read_graph(p, &corpus)?,
        None => DocumentGraph::empty(&corpus, EdgeMode::Hyperlink),
    };
    let mut out = open_out(&args.out)?;
    if args.count == 0 {
        out.flush()?;
        eprintln!("wrote 0 instance(s)");
        return Ok(());
    }
    let tokenizer = Tokenizer::new(vocab).with_lowercase(!args.no_lowercase);
    let tokenized = TokenizedCorpus::build(&corpus, &tokenizer, target_len)?;
    let generator = InstanceGenerator::new(&tokenized, &graph, tokenizer.vocab(), &mix)?;
    if generator.sampler().linkless() {
        eprintln!("graph has no edges: linked share split between contiguous and random");
    }
    let report = generator.write_jsonl(args.count, &mut out)?;
    eprintln!(
        "wrote {} instance(s) (contiguous {}, random {}, linked {}); {} discarded pair(s)",
        report.instances, report.per_option[0], report.per_option[1], report.per_option[2], report.discarded
    );
    Ok(())
}

fn stats(args: &StatsArgs) -> Result<()> {
    if args.input.is_none() && args.graph.is_none() {
        return Err(Error::Config("stats needs --in and/or --graph".into()));
    }
    let mask_id = match &args.vocab {
        Some(p) => Some(load_vocab(p)?.specials().mask),
        None => None,
    };
    let graph = match (&args.graph, &args.corpus) {
        (Some(g), Some(c)) => {
            let corpus = load(c)?;
            Some(read_graph(g, &corpus)?)
        }
        _ => None,
    };

    let stream = match &args.input {
        None => None,
        Some(path) => {
            let result = if path.as_os_str() == "-" {
                summarize_stream(read_instances(io::stdin().lock()), mask_id, graph.as_ref())
            } else {
                let f = File::open(path).map_err(|e| Error::io(path, e))?;
                summarize_stream(read_instances(BufReader::new(f)), mask_id, graph.as_ref())
            };
            let s = result.map_err(|e| match e {
                Error::Malformed { line, message } => {
                    Error::Config(format!("{}: line {line}: {message}", path.display()))
                }
                other => other,
            })?;
            eprint!("{s}");
            Some(s)
        }
    };
    let summary = graph.as_ref().map(graph_stats);
    if let Some(s) = &summary {
        eprint!("{s}");
    }
    let record = json!({ "stream": stream, "graph": summary });
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, &record).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}
