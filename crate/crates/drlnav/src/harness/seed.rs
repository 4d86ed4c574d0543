//! Splittable seeding.
//!
//! A master seed fans out into independent, label-addressed RNG streams
//! (world layout, goal draws, network init, exploration, replay sampling).
//! Streams are derived by hashing the label into the master seed, so how
//! much one consumer draws can never shift another consumer's sequence.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Derives independent child RNGs from one master seed.
#[derive(Debug, Clone, Copy)]
pub struct SeedTree {
    master: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// SplitMix64 round; a full-period mixer over u64.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        SeedTree { master }
    }

    /// A single 64-bit child seed for consumers that take an integer seed.
    pub fn child_seed(&self, label: &str) -> u64 {
        let mut state = self.master ^ fnv1a(label.as_bytes());
        splitmix64(&mut state)
    }

    /// An independent ChaCha stream for the given label.
    pub fn stream(&self, label: &str) -> ChaCha12Rng {
        let mut state = self.master ^ fnv1a(label.as_bytes());
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha12Rng::from_seed(seed)
    }
}
