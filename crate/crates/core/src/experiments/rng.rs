//! Seeded uniform generator and per-simulation seed derivation.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha8 stream seeded from a `u64`. Uniform reals use the top 53 bits of
/// each 64-bit draw, so streams are bit-reproducible across platforms.
#[derive(Clone, Debug)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[a, b)`.
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.unit()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base_seed ⊕ h(experiment, n, delta, index)` where `h` chains splitmix64
/// over the four fields (`delta` by its IEEE-754 bits).
pub fn simulation_seed(base_seed: u64, experiment: u8, n: usize, delta: f64, index: usize) -> u64 {
    let h = [experiment as u64, n as u64, delta.to_bits(), index as u64]
        .iter()
        .fold(0u64, |acc, &v| splitmix64(acc ^ v));
    base_seed ^ h
}
