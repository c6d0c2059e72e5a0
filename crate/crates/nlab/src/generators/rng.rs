//! Seeded, portable randomness for digit sampling.
//!
//! The stream derivation is fixed so that a `(weights, seed)` pair produces
//! the same digits on every platform and in every release:
//!
//! 1. the 64-bit seed is expanded to 32 bytes by four rounds of SplitMix64
//!    (little-endian outputs), which key an 8-round ChaCha generator;
//! 2. each digit consumes one 64-bit draw `x`, mapped to
//!    `u = (x >> 11) · 2^{-53} ∈ [0,1)`;
//! 3. the digit is the smallest `d` with `u < cum[d]`, where `cum` are the
//!    cumulative weights with the final entry forced to 1.0. Intervals are
//!    half-open, so a draw equal to a boundary belongs to the digit above it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Inverse-CDF digit sampler over fixed cumulative weights.
pub(crate) struct DigitSampler {
    rng: ChaCha8Rng,
    cum: Vec<f64>,
}

impl DigitSampler {
    pub(crate) fn new(weights: &[f64], seed: u64) -> Self {
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w;
            cum.push(acc);
        }
        if let Some(last) = cum.last_mut() {
            *last = 1.0;
        }
        DigitSampler {
            rng: rng_from_seed(seed),
            cum,
        }
    }

    pub(crate) fn sample(&mut self) -> u32 {
        let x = self.rng.next_u64();
        let u = (x >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0);
        // Linear scan: digit alphabets are small; block alphabets used for
        // sampling stay in the hundreds.
        match self.cum.iter().position(|&c| u < c) {
            Some(d) => d as u32,
            None => (self.cum.len() - 1) as u32,
        }
    }
}
