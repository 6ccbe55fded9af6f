//! Small helpers over `rand_core` generators.

use rand_core::RngCore;

/// Uniform draw from `[0, 1)` with 53 random bits.
pub fn uniform01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..bound` by rejection; `bound` must be positive.
pub fn below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// Marks `k` of the `flags.len()` positions `true`, uniformly over subsets.
pub fn random_subset<R: RngCore + ?Sized>(rng: &mut R, flags: &mut [bool], k: usize) {
    // Floyd's algorithm
    let len = flags.len();
    flags.iter_mut().for_each(|f| *f = false);
    for j in len - k..len {
        let t = below(rng, j as u64 + 1) as usize;
        if flags[t] {
            flags[j] = true;
        } else {
            flags[t] = true;
        }
    }
}
