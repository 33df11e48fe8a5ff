//! Seed discipline for randomized stages.
//!
//! Every stage takes one 64-bit master seed. Work item `i` (a word, a
//! bootstrap resample) draws from stream `4·i + tag` of a ChaCha8 generator
//! keyed by that seed, so results do not depend on how items are scheduled
//! across threads, and independent draws for one item (its rate, its
//! events) never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for event placement.
pub const EVENTS: u64 = 0;
/// Stream tag for per-item parameter draws.
pub const PARAMETERS: u64 = 1;

pub fn item_stream(seed: u64, index: u64, tag: u64) -> ChaCha8Rng {
    debug_assert!(tag < 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_mul(4).wrapping_add(tag));
    rng
}
