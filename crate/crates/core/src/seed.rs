// SPDX-License-Identifier: Apache-2.0

//! Deterministic seed derivation.
//!
//! Every random stream in an experiment is a ChaCha8 generator seeded from a
//! 64-bit value derived here, so a report is a pure function of its inputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function: a bijection on `u64` with full avalanche.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines two words; not symmetric.
#[inline]
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b)
}

/// Seed of trial `trial` of the experiment `config_hash` under `master`.
///
/// `stream + trial * GOLDEN_GAMMA` is injective in `trial` (the multiplier is
/// odd) and `splitmix64` is a bijection, so distinct trials of one experiment
/// never share a seed.
#[inline]
pub fn trial_seed(master: u64, config_hash: u64, trial: u64) -> u64 {
    let stream = mix(master, config_hash);
    splitmix64(stream.wrapping_add(trial.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 64-bit FNV-1a.
#[derive(Clone, Copy, Debug)]
pub struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv1a {
    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn write_f64(&mut self, v: f64) {
        self.write_u64(v.to_bits());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}
