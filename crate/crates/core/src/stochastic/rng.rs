use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::normal::norm_inv;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Names a reproducible random sequence.
///
/// `(seed, stream_id)` fully determines the output; ChaCha's 64-bit stream
/// selector keeps sequences with distinct ids independent, so any block of
/// work can be generated by its own worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// The stream `offset` positions further along.
    pub fn offset(&self, offset: u64) -> Self {
        Self { seed: self.seed, stream_id: self.stream_id.wrapping_add(offset) }
    }

    pub fn generator(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        StreamRng { rng, bits: 0, n_bits: 0 }
    }
}

/// Draws uniforms, normals and fair signs from one stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: ChaCha8Rng,
    bits: u64,
    n_bits: u32,
}

impl StreamRng {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Standard normal by inversion of the uniform.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        norm_inv(self.uniform())
    }

    /// +1 or -1 with equal probability.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.n_bits == 0 {
            self.bits = self.rng.next_u64();
            self.n_bits = 64;
        }
        let b = self.bits & 1;
        self.bits >>= 1;
        self.n_bits -= 1;
        if b == 1 {
            1.0
        } else {
            -1.0
        }
    }
}
