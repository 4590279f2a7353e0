//! Seeded random source shared by every generator.
//!
//! Outputs must be reproducible bit for bit across platforms and ports, so the
//! stream and every derived draw are pinned here instead of relying on a
//! library's distribution code:
//!
//! * generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`);
//! * seeding: `SeedableRng::seed_from_u64`, which expands the `u64` into the
//!   32-byte key with the PCG32 routine defined by `rand_core`;
//! * `below(n)`: draw `x = next_u64()`, reject while `x < 2^64 mod n`,
//!   return `x % n`;
//! * `unit()`: `(next_u64() >> 11) * 2^-53`, a double in `[0, 1)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Salts for deriving independent sub-streams from one user seed.
pub(crate) mod stream {
    pub const PLAN: u64 = 0x9e37_79b9_7f4a_7c15;
    pub const EVENTS: u64 = 0xc2b2_ae3d_27d4_eb4f;
}

#[derive(Debug, Clone)]
pub struct DetRng {
    inner: ChaCha8Rng,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// Uniform index into a slice of length `len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}
