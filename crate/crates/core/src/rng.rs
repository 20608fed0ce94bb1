//! Counter-based random streams.
//!
//! Every stream is SplitMix64: the `i`-th output (counting from 1) of a
//! stream with key `k` is `mix(k + i * GOLDEN)` with wrapping arithmetic,
//! where
//!
//! ```text
//! GOLDEN = 0x9E37_79B9_7F4A_7C15
//! mix(z): z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//!         z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//!         z ^ (z >> 31)
//! ```
//!
//! Substreams are keyed by [`derive_stream`]. Because the output is a pure
//! function of `(key, counter)`, any implementation following the three
//! definitions in this module reproduces the same bits.

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the substream for `(seed, trial)`:
/// `mix64(mix64(seed) ^ trial * GOLDEN)`.
///
/// For a fixed seed this is injective in `trial` (composition of
/// bijections), so distinct trials never share a key.
pub fn derive_stream(seed: u64, trial: u64) -> u64 {
    mix64(mix64(seed) ^ trial.wrapping_mul(GOLDEN))
}

#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(key: u64) -> Self {
        Stream { key, counter: 0 }
    }

    pub fn for_trial(seed: u64, trial: u64) -> Self {
        Stream::new(derive_stream(seed, trial))
    }

    /// Number of 64-bit words consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw from the 53-bit dyadic grid `{k / 2^53}` in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, range)` by Lemire's multiply-and-reject.
    /// Exact: rejected draws are redrawn, never biased.
    pub fn below(&mut self, range: u64) -> u64 {
        assert!(range > 0, "empty range");
        let mut m = (self.next_u64() as u128) * (range as u128);
        if (m as u64) < range {
            let threshold = range.wrapping_neg() % range;
            while (m as u64) < threshold {
                m = (self.next_u64() as u128) * (range as u128);
            }
        }
        (m >> 64) as u64
    }

    /// Uniform permutation of `0..n` by Fisher–Yates, swapping position
    /// `i = n-1, ..., 1` with `below(i + 1)`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        perm
    }
}
