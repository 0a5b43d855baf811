//! Seed derivation.
//!
//! Every stochastic stage draws from its own ChaCha stream keyed by a
//! SHA-256 digest of the master seed and a list of labels, so streams are
//! independent of one another and of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives a 64-bit seed from a master seed and labelled parts.
pub fn derive(master: u64, parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"ctximpute/seed/v1");
    h.update(master.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}

/// Seed for repetition `r` of an experiment.
pub fn repetition(master: u64, r: usize) -> u64 {
    derive(master, &[b"repetition", &(r as u64).to_le_bytes()])
}

pub fn rng(master: u64, parts: &[&[u8]]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, parts))
}
