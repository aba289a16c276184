//! Deterministic, splittable randomness.
//!
//! Every random choice in the crate is drawn from a [`ChaCha20Rng`] whose seed
//! is derived from a root seed and a path of labels. Two derivations with the
//! same root and path yield the same stream; different paths are independent.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub use rand_chacha::ChaCha20Rng as ProtocolRng;

/// Derives a child generator from `seed` and a label path.
pub fn derive_rng(seed: u64, path: &[u64]) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(b"atasses/rng/v1");
    hasher.update(seed.to_le_bytes());
    hasher.update((path.len() as u64).to_le_bytes());
    for label in path {
        hasher.update(label.to_le_bytes());
    }
    ChaCha20Rng::from_seed(hasher.finalize().into())
}

/// Stable numeric label for a string tag, for use in [`derive_rng`] paths.
pub fn label(tag: &str) -> u64 {
    let digest = Sha256::digest(tag.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}
