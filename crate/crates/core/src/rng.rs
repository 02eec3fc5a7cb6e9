//! Counter-style random streams.
//!
//! Every stochastic routine splits its work into fixed-size chunks and gives
//! chunk `k` its own ChaCha stream, so results do not depend on how many
//! worker threads process the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

/// Draws per chunk; fixed so results are independent of scheduling.
pub const CHUNK: usize = 4096;

/// Stream `stream` of the generator keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer: derives well-separated child seeds.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `draw` for indices `0..count`, chunk by chunk, collecting in index order.
pub fn chunked_map<T, F>(seed: u64, count: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = stream(seed, k as u64);
            let start = k * CHUNK;
            let end = (start + CHUNK).min(count);
            (start..end).map(|i| draw(&mut rng, i)).collect::<Vec<_>>()
        })
        .collect()
}

/// Counts indices in `0..count` for which `hit` returns true.
pub fn chunked_count<F>(seed: u64, count: usize, hit: F) -> usize
where
    F: Fn(&mut StreamRng) -> bool + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            let start = k * CHUNK;
            let end = (start + CHUNK).min(count);
            (start..end).filter(|_| hit(&mut rng)).count()
        })
        .sum()
}
