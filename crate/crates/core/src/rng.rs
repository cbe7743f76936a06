//! Seed derivation. Every random stream in the crate is a ChaCha8 stream
//! keyed by a `u64` seed and a stream number, so results never depend on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for replication `index` of task `task` under `seed`.
pub fn derive_seed(seed: u64, task: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(task.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ splitmix64(index)))
}
