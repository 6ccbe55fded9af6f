//! Statistically equivalent blocks for two-sample testing.
//!
//! A reference sample `Y` of size `n` cuts p-dimensional space into `n + 1`
//! blocks through a data-independent schedule of coordinate-projection cuts.
//! Counting how many points of a second sample `X` land in each block gives
//! the block frequencies `(R_1, ..., R_{n+1})`. Under the null hypothesis of
//! identical continuous populations every frequency vector is equally likely,
//! whatever the dimension, so every statistic built from the frequencies has
//! an exact, distribution-free null law.
//!
//! The crate is `no_std` and only needs `alloc`:
//!
//! - [`partition`]: cut plans, fitting a plan to `Y`, block membership.
//! - [`nulldist`]: exact null distributions in rational arithmetic, plus
//!   brute-force enumeration oracles.
//! - [`scores`]: score vectors for linear rank statistics.
//! - [`testing`]: test statistics, p-values and randomized decisions.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod combinatorics;
mod error;
pub mod nulldist;
pub mod partition;
pub mod rng;
mod sample;
pub mod scores;
pub mod special;
pub mod testing;

pub use error::{Error, Result};
pub use sample::Sample;

/// Default cap on the number of equally likely frequency vectors an exact
/// enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
