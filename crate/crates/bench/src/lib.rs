//! Seeded inputs shared by the benchmarks, so every run measures the same work.

use fairshare::ladder::{random_y, YSeq};
use fairshare::model::generate::{random_additive, random_subadditive, random_xos};
use fairshare::Valuation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed;

/// One additive, one XOS and one subadditive table valuation over `m` items.
pub fn valuations(m: usize) -> Vec<(&'static str, Valuation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    vec![
        ("additive", random_additive(&mut rng, m, 20)),
        ("xos", random_xos(&mut rng, m, 4, 20)),
        ("subadditive", random_subadditive(&mut rng, m, 20)),
    ]
}

pub fn y_sequences(k: usize, count: usize) -> Vec<YSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| random_y(&mut rng, k)).collect()
}
