//! Reproducible randomness: counter-based ChaCha streams keyed by
//! (seed, task id), so parallel or reordered tasks draw identical values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// An independent substream for one task. Same (seed, task) always yields the
/// same sequence regardless of how many other substreams were consumed.
pub fn substream(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}
