//! Named random sub-streams derived from one root seed.
//!
//! Every consumer of randomness (instance generation, tomography shots, norm
//! noise, ...) asks for its own stream by name and index, so changing how
//! one component draws never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedTree {
    root: u64,
}

impl SeedTree {
    pub fn new(root: u64) -> Self {
        SeedTree { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Independent ChaCha20 stream for `(name, index)`.
    pub fn stream(&self, name: &str, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.root ^ fnv1a(name.as_bytes()));
        rng.set_stream(index);
        rng
    }

    /// A child tree, for components that need their own named streams.
    pub fn child(&self, name: &str, index: u64) -> SeedTree {
        let h = fnv1a(name.as_bytes()) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        SeedTree {
            root: self.root.rotate_left(17) ^ h,
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
