//! Reproducible randomness: every experiment draws from a ChaCha stream
//! addressed by `(seed, stream_id)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, GSet};
use crate::bitset::BitSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededSource {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededSource { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn substream(&self, k: u64) -> SeededSource {
        SeededSource::new(
            self.seed ^ self.stream_id.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            k,
        )
    }
}

/// Uniform subset of the ambient: every element independently with
/// probability 1/2. One raw 64-bit word per 64 elements, so the result is
/// a pure function of the generator state.
pub fn random_half_subset<R: RngCore>(ambient: Ambient, rng: &mut R) -> GSet {
    let n = ambient.size();
    let mut mask = BitSet::new(n);
    let mut base = 0;
    while base < n {
        let mut w = rng.next_u64();
        let upto = (n - base).min(64);
        for b in 0..upto {
            if w & 1 == 1 {
                mask.insert(base + b);
            }
            w >>= 1;
        }
        base += 64;
    }
    GSet::from_mask(ambient, mask).expect("mask width matches ambient")
}

/// Subset with each element present independently with probability `p`.
pub fn random_subset<R: RngCore>(ambient: Ambient, p: f64, rng: &mut R) -> GSet {
    let n = ambient.size();
    let mut mask = BitSet::new(n);
    for i in 0..n {
        if unit_f64(rng) < p {
            mask.insert(i);
        }
    }
    GSet::from_mask(ambient, mask).expect("mask width matches ambient")
}

/// Uniform `f64` in `[0, 1)` from the top 53 bits of one word.
#[inline]
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, n)` by rejection, platform independent.
pub fn below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0);
    let zone = u64::MAX - (u64::MAX % n) - 1;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % n;
        }
    }
}

/// `k` distinct indices from `[0, n)` (partial Fisher–Yates), sorted.
pub fn sample_indices<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut out = pool[..k].to_vec();
    out.sort_unstable();
    out
}
