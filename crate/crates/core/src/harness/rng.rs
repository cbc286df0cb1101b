//! Per-sample random streams.
//!
//! Sample `i` of a corpus with seed `s` draws from a splitmix64 generator
//! whose state starts at `s ^ i`. Uniforms take the top 53 bits of each
//! output; normals use the Box–Muller cosine branch (two outputs per normal).

use num_complex::Complex64;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub struct SampleRng(SplitMix64);

impl SampleRng {
    pub fn new(seed: u64, index: u64) -> Self {
        SampleRng(SplitMix64::seed_from_u64(seed ^ index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.uniform() * (hi - lo + 1) as f64) as usize
    }

    /// `10^U` with `U` uniform on `[lo, hi)`.
    pub fn log_uniform(&mut self, lo_exp10: f64, hi_exp10: f64) -> f64 {
        10f64.powf(self.uniform_in(lo_exp10, hi_exp10))
    }

    /// Standard normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Standard complex Gaussian: independent parts of variance 1/2.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s * self.normal(), s * self.normal())
    }
}
