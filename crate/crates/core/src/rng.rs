//! Splittable seeding for reproducible Monte Carlo.
//!
//! A [`Substreams`] value is a master seed. Work item `i` draws from
//! `stream(i)`, a ChaCha8 generator keyed by the master seed with its
//! 64-bit stream id set to `i`; distinct ids never share state. Nested
//! experiments (grid cell → replication) use `derive(i)` to obtain a fresh
//! master seed for the inner level.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substreams {
    seed: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for work item `index`.
    pub fn stream(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Child seed family for a nested level of work.
    pub fn derive(&self, index: u64) -> Substreams {
        let mixed = splitmix64(self.seed ^ splitmix64(index.wrapping_add(0x6a09_e667_f3bc_c909)));
        Substreams { seed: mixed }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
