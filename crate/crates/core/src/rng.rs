//! Seedable uniform-variate streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Name of the underlying generator, recorded in run metadata.
pub const GENERATOR_NAME: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64 + set_stream)";

/// A reproducible source of uniform variates.
///
/// The pair `(seed, stream_id)` fully determines the sequence. Distinct
/// stream ids select disjoint ChaCha20 streams under the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream number `index`. The child's key is derived from this
    /// stream's `(seed, stream_id)` and its stream id is `index`.
    pub fn substream(&self, index: u64) -> RandomStream {
        RandomStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_id.wrapping_add(0x5851_f42d_4c95_7f2d))),
            stream_id: index,
        }
    }

    /// `count` uniforms in `[0, 1)`.
    pub fn uniforms(&self, count: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..count).map(|_| rng.random::<f64>()).collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
