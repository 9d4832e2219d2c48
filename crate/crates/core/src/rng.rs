//! Seeded random streams.
//!
//! Every randomized routine takes a root seed. Independent work items
//! (trials, samples, amplification runs) draw from their own ChaCha stream
//! indexed by position, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for work item `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed, for nested levels of independent work.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    let mut rng = stream(seed, index ^ 0x9e37_79b9_7f4a_7c15);
    rng.next_u64()
}
