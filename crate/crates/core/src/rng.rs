//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a 64-bit
//! seed. Child seeds are derived from a parent by hashing `(parent, index)`
//! with the SplitMix64 finalizer, so the stream used for a given forecast
//! origin or Monte-Carlo path depends only on its position in the tree and
//! never on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A node in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedKey(u64);

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedKey {
    pub fn new(root: u64) -> Self {
        SeedKey(mix(root.wrapping_add(GOLDEN)))
    }

    pub fn child(self, index: u64) -> Self {
        SeedKey(mix(self.0 ^ mix(index.wrapping_add(GOLDEN).wrapping_mul(GOLDEN))))
    }

    /// Convenience for a path of child indices.
    pub fn descend(self, path: &[u64]) -> Self {
        path.iter().fold(self, |k, &i| k.child(i))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
