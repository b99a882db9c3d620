//! Counter-based random streams.
//!
//! A [`RandomSource`] is identified by `(seed, stream)`. The generator behind
//! it is ChaCha8 keyed by the seed with the stream index selecting one of its
//! 2⁶⁴ independent streams, so the value sequence depends only on those two
//! integers. Parallel experiments never share a generator: each trial gets
//! its own source through [`RandomSource::derive_stream`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. A bijection on `u64`.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reproducible random stream addressed by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RandomSource {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Fresh source for trial `index`, computed from `(seed, stream, index)`
    /// alone. Draws already taken from `self` have no effect.
    ///
    /// For a fixed parent, distinct indices map to distinct streams.
    pub fn derive_stream(&self, index: u64) -> RandomSource {
        RandomSource::new(self.seed, derive_stream_id(self.stream, index))
    }
}

fn derive_stream_id(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Free-function form of [`RandomSource::derive_stream`].
pub fn derive_stream(rng: &RandomSource, trial_index: u64) -> RandomSource {
    rng.derive_stream(trial_index)
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Folds a sequence of words into one stream key.
pub(crate) fn stream_key(words: impl IntoIterator<Item = u64>) -> u64 {
    words
        .into_iter()
        .fold(GOLDEN_GAMMA, |acc, w| mix64(acc.rotate_left(17) ^ mix64(w)))
}
