//! Seeded generators.
//!
//! Every random decision is drawn from a ChaCha8 stream keyed by the user seed
//! and a purpose tag and numbered by the unit of work (node or instance index).
//! Output therefore depends only on the seed, never on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PipelineRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub(crate) enum Purpose {
    RandomGraph = 0x5241_4e44_4752_4150,
    Instances = 0x494e_5354_414e_4345,
}

/// Generator for work unit `index` under `seed` and `purpose`.
pub(crate) fn stream_rng(seed: u64, purpose: Purpose, index: u64) -> PipelineRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ purpose as u64);
    rng.set_stream(index);
    rng
}

/// Generator for instance `index` of a stream seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> PipelineRng {
    stream_rng(seed, Purpose::Instances, index)
}
