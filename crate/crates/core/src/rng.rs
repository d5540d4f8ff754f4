//! Reproducible, label-addressed randomness.
//!
//! A [`RandomStream`] is a ChaCha12 keystream whose key is
//! `SHA-256("grouplab/stream/v1" || master_seed_le || label)`. The word
//! counter of the keystream is the stream position, so every output is a
//! pure function of `(master_seed, label, counter)` and streams with
//! different labels are independent.

use rand::{Rng, RngCore};
use rand_chacha::rand_core::{self, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

const DOMAIN_TAG: &[u8] = b"grouplab/stream/v1";

/// Source of uniform integers. Implemented by [`RandomStream`] for Monte
/// Carlo work and by [`crate::exact::Branch`] for exhaustive enumeration.
pub trait Sampler {
    /// Uniform integer in `0..n`. `n` must be positive.
    fn below(&mut self, n: u64) -> u64;

    fn coin(&mut self) -> bool {
        self.below(2) == 1
    }
}

impl<S: Sampler + ?Sized> Sampler for &mut S {
    fn below(&mut self, n: u64) -> u64 {
        (**self).below(n)
    }
}

#[derive(Clone, Debug)]
pub struct RandomStream {
    master_seed: u64,
    label: String,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, label: impl Into<String>) -> Self {
        let label = label.into();
        let mut hasher = Sha256::new();
        hasher.update(DOMAIN_TAG);
        hasher.update(master_seed.to_le_bytes());
        hasher.update(label.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        RandomStream {
            master_seed,
            label,
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    /// Stream positioned at `counter` 32-bit words into its keystream.
    pub fn at(master_seed: u64, label: impl Into<String>, counter: u128) -> Self {
        let mut s = Self::new(master_seed, label);
        s.rng.set_word_pos(counter);
        s
    }

    /// Child stream `"<label>/<child>"` under the same master seed. It does
    /// not depend on how much of the parent has been consumed.
    pub fn substream(&self, child: &str) -> Self {
        Self::new(self.master_seed, format!("{}/{}", self.label, child))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

impl Sampler for RandomStream {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "cannot sample from an empty range");
        self.rng.gen_range(0..n)
    }
}
