//! Seeded randomness with a pinned, portable algorithm.
//!
//! Every random draw in this crate flows through [`SplitMix64`], Steele,
//! Lea and Flood's counter-based generator with a 64-bit seed. The generator
//! and the shuffle below are fixed by this module's documentation: the same
//! seed must produce the same permutation on every platform and in every
//! future version, because experiment CSVs are required to be byte-for-byte
//! reproducible. Do not swap in a library RNG whose stream may change across
//! releases.

/// SplitMix64: state advances by the golden-ratio increment, outputs are the
/// finalizer of the new state. Passes BigCrush in both directions; more than
/// good enough for shuffling.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix(self.state)
    }

    /// Uniform draw from `0..bound` by rejection sampling, so the result is
    /// exactly uniform (no modulo bias). `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Reject the low `2^64 mod bound` values of the range.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    pub fn next_f64(&mut self) -> f64 {
        // 53 uniform bits into [0, 1).
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// SplitMix64's output finalizer (also usable as a standalone 64-bit mixer).
#[inline]
pub fn mix(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random permutation of `[n]` from a 64-bit seed.
///
/// Fisher-Yates, iterating `i` from `n-1` down to `1` and swapping position
/// `i` with a uniform `j` in `0..=i` drawn by rejection from [`SplitMix64`].
/// This exact loop is part of the reproducibility contract.
pub fn random_permutation(n: usize, seed: u64) -> crate::perm::Permutation {
    let mut entries: Vec<u32> = (1..=n as u32).collect();
    shuffle(&mut entries, &mut SplitMix64::new(seed));
    crate::perm::Permutation::new(entries).expect("shuffle preserves the value set")
}

pub(crate) fn shuffle(slice: &mut [u32], rng: &mut SplitMix64) {
    for i in (1..slice.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        slice.swap(i, j);
    }
}

/// Per-trial seed for experiment runs, derived from the master seed, the
/// instance size, and the trial index:
///
/// ```text
/// seed(master, n, trial) = mix(mix(master ^ mix(n)) ^ (trial + 1))
/// ```
///
/// with [`mix`] the SplitMix64 finalizer. Distinct `(n, trial)` cells get
/// decorrelated streams while the whole experiment stays a pure function of
/// the master seed.
pub fn derive_trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    mix(mix(master ^ mix(n as u64)) ^ (trial as u64 + 1))
}
