//! The seeded generator behind every random instance.
//!
//! SplitMix64 (Steele, Lea and Flood) with the seed used directly as the
//! initial 64-bit state. Derived draws are fixed so other implementations can
//! reproduce instances bit-for-bit:
//!
//! * `next_f64` = `(next_u64 >> 11) * 2^-53`, uniform on `[0, 1)`;
//! * `below(k)` = high 64 bits of the 128-bit product `next_u64 * k`.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Clone, Debug)]
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `lo..hi`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Integer in `0..k`; `k` must be positive.
    pub fn below(&mut self, k: usize) -> usize {
        assert!(k > 0, "below(0)");
        ((u128::from(self.next_u64()) * k as u128) >> 64) as usize
    }

    /// Fisher-Yates shuffle drawing `below(i + 1)` for `i` from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
