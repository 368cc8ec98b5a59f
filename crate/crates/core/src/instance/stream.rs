use std::io::{BufRead, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use super::{assemble_instance, MixConfig, PairSampler, TokenizedCorpus, TrainingInstance};
use crate::error::{Error, Result};
use crate::graph::DocumentGraph;
use crate::rng::instance_rng;
use crate::tokenizer::Vocabulary;

const MAX_ATTEMPTS: u32 = 10_000;
const WRITE_CHUNK: usize = 8192;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub instances: usize,
    /// Pairs dropped because truncation emptied a segment.
    pub discarded: usize,
    /// Realized instances per relation label.
    pub per_option: [usize; 3],
}

impl GenerationReport {
    fn merge(&mut self, other: &GenerationReport) {
        self.instances += other.instances;
        self.discarded += other.discarded;
        for (a, b) in self.per_option.iter_mut().zip(other.per_option) {
            *a += b;
        }
    }
}

/// Produces instance `i` from its own generator keyed by `(mix.seed, i)`, so
/// any subset of indices can be built on any thread in any order.
pub struct InstanceGenerator<'a> {
    sampler: PairSampler<'a>,
    corpus: &'a TokenizedCorpus,
    vocab: &'a Vocabulary,
    mix: MixConfig,
}

impl<'a> InstanceGenerator<'a> {
    pub fn new(
        corpus: &'a TokenizedCorpus,
        graph: &'a DocumentGraph,
        vocab: &'a Vocabulary,
        mix: &MixConfig,
    ) -> Result<Self> {
        Ok(InstanceGenerator {
            sampler: PairSampler::new(corpus, graph, mix)?,
            corpus,
            vocab,
            mix: *mix,
        })
    }

    pub fn sampler(&self) -> &PairSampler<'a> {
        &self.sampler
    }

    /// Instance `index` and the number of pairs discarded on the way to it.
    pub fn instance(&self, index: u64) -> Result<(TrainingInstance, usize)> {
        let mut rng = instance_rng(self.mix.seed, index);
        for attempt in 0..MAX_ATTEMPTS {
            let pair = self.sampler.sample(&mut rng);
            if let Some(inst) = assemble_instance(&pair, self.corpus, self.vocab, &self.mix, &mut rng) {
                return Ok((inst, attempt as usize));
            }
        }
        Err(Error::InfeasibleMix(format!(
            "no valid instance after {MAX_ATTEMPTS} attempts at index {index}"
        )))
    }

    /// Instances for `range`, built in parallel, returned in index order.
    pub fn generate(&self, range: Range<u64>) -> Result<(Vec<TrainingInstance>, GenerationReport)> {
        let built: Vec<(TrainingInstance, usize)> =
            range.into_par_iter().map(|i| self.instance(i)).collect::<Result<_>>()?;
        let mut report = GenerationReport::default();
        let instances = built
            .into_iter()
            .map(|(inst, discarded)| {
                report.instances += 1;
                report.discarded += discarded;
                report.per_option[inst.drp_label as usize] += 1;
                inst
            })
            .collect();
        Ok((instances, report))
    }

    /// Writes `count` instances as JSON lines in index order.
    pub fn write_jsonl<W: Write>(&self, count: u64, mut out: W) -> Result<GenerationReport> {
        let mut report = GenerationReport::default();
        let mut start = 0u64;
        while start < count {
            let end = (start + WRITE_CHUNK as u64).min(count);
            let (chunk, part) = self.generate(start..end)?;
            for inst in &chunk {
                serde_json::to_writer(&mut out, inst).map_err(std::io::Error::from)?;
                out.write_all(b"\n")?;
            }
            report.merge(&part);
            start = end;
        }
        out.flush()?;
        Ok(report)
    }
}

/// Generates `count` instances; output depends only on the inputs and
/// `mix.seed`.
pub fn generate_stream(
    corpus: &TokenizedCorpus,
    graph: &DocumentGraph,
    vocab: &Vocabulary,
    mix: &MixConfig,
    count: usize,
) -> Result<(Vec<TrainingInstance>, GenerationReport)> {
    if count == 0 {
        return Ok((Vec::new(), GenerationReport::default()));
    }
    InstanceGenerator::new(corpus, graph, vocab, mix)?.generate(0..count as u64)
}

/// Parses line-delimited instance records, reporting 1-based line numbers.
pub fn read_instances<R: BufRead>(reader: R) -> impl Iterator<Item = Result<TrainingInstance>> {
    reader.lines().enumerate().filter_map(|(idx, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        if line.trim().is_empty() {
            return None;
        }
        Some(
            serde_json::from_str::<TrainingInstance>(&line)
                .map_err(|e| Error::malformed(idx + 1, format!("invalid instance record: {e}"))),
        )
    })
}
