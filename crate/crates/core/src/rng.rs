//! Seeded random source used by every generator.
//!
//! The stream is ChaCha20 (Bernstein's stream cipher as a counter-based
//! generator, via `rand_chacha`), keyed from the 64-bit seed with
//! `SeedableRng::seed_from_u64`. Its output is value-stable across platforms
//! and crate releases. Gaussian variates come from the Box-Muller transform
//! applied to pairs of open-interval uniforms, so the mapping from the raw
//! stream to normals is fixed and documented here rather than delegated.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Beta, Distribution};

use crate::{Error, Result};

pub struct TraceRng {
    inner: ChaCha20Rng,
}

impl TraceRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in the open interval (0, 1) with 53 bits of resolution.
    pub fn uniform_open(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals from one uniform pair.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        (radius * angle.cos(), radius * angle.sin())
    }

    /// Fills `out` with standard normals, consuming pairs in order.
    pub fn fill_normal(&mut self, out: &mut [f64]) {
        let mut chunks = out.chunks_exact_mut(2);
        for pair in &mut chunks {
            let (a, b) = self.normal_pair();
            pair[0] = a;
            pair[1] = b;
        }
        if let [last] = chunks.into_remainder() {
            *last = self.normal_pair().0;
        }
    }

    pub(crate) fn symmetric_beta(&mut self, shape: f64) -> Result<BetaSampler> {
        Beta::new(shape, shape)
            .map(BetaSampler)
            .map_err(|e| Error::invalid("multiplier shape", e.to_string()))
    }

    pub(crate) fn sample_open_unit(&mut self, beta: &BetaSampler) -> f64 {
        // Beta draws can round to the closed endpoints for small shapes.
        loop {
            let w = beta.0.sample(&mut self.inner);
            if w > 0.0 && w < 1.0 {
                return w;
            }
        }
    }
}

pub(crate) struct BetaSampler(Beta<f64>);
