//! Seeded, stream-addressable randomness.
//!
//! All stochastic operations draw from ChaCha8, a counter-based generator
//! with 2^64 independent streams per seed. A batch item with index `i` uses
//! stream `i` of the master seed, so batches are reproducible bit-for-bit
//! regardless of execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG for stream `stream` of `master_seed`.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Stream ids for the sub-processes of a single protocol run.
///
/// A protocol run consumes several independent random processes; giving each
/// a fixed stream offset keeps them decoupled when configs change.
#[derive(Clone, Copy, Debug)]
pub enum ProcessStream {
    Telegraph = 0,
    Drift = 1,
    Mapping = 2,
    CarrierNoise = 3,
}

/// RNG for one sub-process of batch item `index` under `master_seed`.
///
/// Stream layout: `index * 8 + process`, leaving room for future processes
/// without perturbing existing ones.
pub fn process_rng(master_seed: u64, index: u64, process: ProcessStream) -> ChaCha8Rng {
    stream_rng(master_seed, index * 8 + process as u64)
}
