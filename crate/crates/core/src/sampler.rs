//! Seeded randomness shared by every key generator and encryptor.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::params::SecretDist;

/// Deterministic sampler built on ChaCha20.
///
/// Tests can switch off the error term (`noiseless`) or the uniform masks as
/// well (`degenerate`), which makes every ciphertext a trivial encryption.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha20Rng,
    zero_noise: bool,
    zero_mask: bool,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha20Rng::seed_from_u64(seed), zero_noise: false, zero_mask: false }
    }

    /// Uniform masks, no error term.
    pub fn noiseless(seed: u64) -> Self {
        Sampler { zero_noise: true, ..Self::new(seed) }
    }

    /// No error term and all-zero masks.
    pub fn degenerate() -> Self {
        Sampler { zero_noise: true, zero_mask: true, ..Self::new(0) }
    }

    pub fn is_noiseless(&self) -> bool {
        self.zero_noise
    }

    /// Independent child stream; the parent advances by one draw.
    pub fn fork(&mut self) -> Sampler {
        Sampler {
            rng: ChaCha20Rng::seed_from_u64(self.rng.next_u64()),
            zero_noise: self.zero_noise,
            zero_mask: self.zero_mask,
        }
    }

    /// Uniform value in `[0, modulus)` (zero in degenerate mode).
    #[inline]
    pub fn uniform(&mut self, modulus: u64) -> u64 {
        if self.zero_mask {
            0
        } else {
            self.rng.random_range(0..modulus)
        }
    }

    pub fn uniform_vec(&mut self, len: usize, modulus: u64) -> Vec<u64> {
        (0..len).map(|_| self.uniform(modulus)).collect()
    }

    /// Rounded Gaussian with the given standard deviation.
    pub fn gaussian(&mut self, stddev: f64) -> i64 {
        if self.zero_noise || stddev <= 0.0 {
            return 0;
        }
        let normal = Normal::new(0.0, stddev).expect("finite stddev");
        normal.sample(&mut self.rng).round() as i64
    }

    /// Fills `out` with rounded Gaussian samples.
    pub fn gaussian_fill(&mut self, stddev: f64, out: &mut [i64]) {
        if self.zero_noise || stddev <= 0.0 {
            out.fill(0);
            return;
        }
        let normal = Normal::new(0.0, stddev).expect("finite stddev");
        for x in out {
            *x = normal.sample(&mut self.rng).round() as i64;
        }
    }

    /// One secret coefficient from `dist`, as a signed value.
    pub fn secret(&mut self, dist: SecretDist) -> i64 {
        match dist {
            SecretDist::Binary => self.rng.random_range(0..2),
            SecretDist::Ternary => self.rng.random_range(-1..=1),
        }
    }

    /// Raw 64-bit draw, e.g. for deriving sub-seeds.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
