//! Counter-addressed random streams.
//!
//! Every draw is a pure function of `(master_seed, purpose, index, counter)`:
//! a ChaCha8 keystream is selected by the seed and a stream id built from the
//! purpose tag and the index, and the counter fixes the word position. Draws
//! consume a fixed number of words, so sequential and random-access
//! generation agree bit for bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// What a stream is used for. Distinct purposes never share a keystream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Amplitudes = 0,
    Jitter = 1,
    Boost = 2,
    Initial = 3,
}

const PURPOSE_BITS: u32 = 3;

fn stream_id(purpose: Purpose, index: u64) -> u64 {
    (index << PURPOSE_BITS) | purpose as u64
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(master_seed: u64, purpose: Purpose, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id(purpose, index));
        CounterRng { inner }
    }

    /// Stream positioned at the `counter`-th 64-bit draw.
    pub fn at(master_seed: u64, purpose: Purpose, index: u64, counter: u64) -> Self {
        let mut rng = Self::new(master_seed, purpose, index);
        rng.inner.set_word_pos(2 * counter as u128);
        rng
    }

    /// Uniform on `[0, 1)` with 53 bits; one 64-bit draw.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normals by Box-Muller; two 64-bit draws.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        (r * c, r * s)
    }
}

/// The `counter`-th normal pair of a stream, without generating its predecessors.
pub fn normal_pair_at(master_seed: u64, purpose: Purpose, index: u64, counter: u64) -> (f64, f64) {
    CounterRng::at(master_seed, purpose, index, 2 * counter).normal_pair()
}

/// The `counter`-th uniform of a stream.
pub fn uniform_at(master_seed: u64, purpose: Purpose, index: u64, counter: u64) -> f64 {
    CounterRng::at(master_seed, purpose, index, counter).uniform()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let mut seq = CounterRng::new(99, Purpose::Amplitudes, 5);
        for l in 0..50 {
            let pair = seq.normal_pair();
            assert_eq!(pair, normal_pair_at(99, Purpose::Amplitudes, 5, l));
        }
        let mut seq = CounterRng::new(3, Purpose::Jitter, 0);
        for l in 0..20 {
            assert_eq!(seq.uniform(), uniform_at(3, Purpose::Jitter, 0, l));
        }
    }

    #[test]
    fn purposes_and_indices_are_distinct_streams() {
        let a = normal_pair_at(1, Purpose::Amplitudes, 0, 0);
        let b = normal_pair_at(1, Purpose::Jitter, 0, 0);
        let c = normal_pair_at(1, Purpose::Amplitudes, 1, 0);
        let d = normal_pair_at(2, Purpose::Amplitudes, 0, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn uniform_range() {
        let mut rng = CounterRng::new(0, Purpose::Boost, 0);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
