//! Counter-based random substreams.
//!
//! Every Monte-Carlo loop derives the generator for sample `index` from
//! `(seed, index)` alone, so results do not depend on how indices are
//! scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Root stream for a seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Substream of a substream, for nested loops (e.g. per sample, per probe).
pub fn substream2(seed: u64, outer: u64, inner: u64) -> Stream {
    substream(splitmix(seed ^ splitmix(outer)), inner)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
