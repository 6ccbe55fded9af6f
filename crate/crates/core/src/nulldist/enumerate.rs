//! Complete enumeration of equally likely frequency vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::binomial_saturating;
use crate::error::{invalid, Error, Result};

/// Number of frequency vectors for `(m, n)`, saturating.
pub fn vector_count(m: u64, n: u64) -> u64 {
    binomial_saturating(m.saturating_add(n), n)
}

/// Fails with [`Error::Capacity`] when `C(m+n, n)` exceeds `cap`.
pub fn check_capacity(m: u64, n: u64, cap: u64) -> Result<u64> {
    let required = vector_count(m, n);
    if required > cap {
        return Err(Error::Capacity { required, cap });
    }
    Ok(required)
}

/// Calls `visit` on every vector `(r_1, ..., r_{n+1})` of non-negative
/// integers summing to `m`, in descending lexicographic order starting at
/// `(m, 0, ..., 0)`.
pub fn for_each_frequency_vector(
    m: u64,
    n: u64,
    cap: u64,
    mut visit: impl FnMut(&[u64]),
) -> Result<u64> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let total = check_capacity(m, n, cap)?;
    let last = n as usize;
    let mut v = vec![0u64; last + 1];
    v[0] = m;
    loop {
        visit(&v);
        let Some(k) = (0..last).rev().find(|&k| v[k] > 0) else {
            break;
        };
        let tail: u64 = v[k + 1..].iter().sum();
        v[k] -= 1;
        v[k + 1] = tail + 1;
        for x in &mut v[k + 2..] {
            *x = 0;
        }
    }
    Ok(total)
}

/// Every frequency vector for `(m, n)`, each with probability `1/C(m+n, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyEnumeration {
    m: u64,
    n: u64,
    vectors: Vec<Vec<u64>>,
}

impl FrequencyEnumeration {
    /// Materializes the full listing.
    pub fn new(m: u64, n: u64, cap: u64) -> Result<Self> {
        let mut vectors = Vec::new();
        for_each_frequency_vector(m, n, cap, |v| vectors.push(v.to_vec()))?;
        Ok(Self { m, n, vectors })
    }

    /// Comparison-sample size.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Reference-sample size.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// The vectors in enumeration order.
    pub fn vectors(&self) -> &[Vec<u64>] {
        &self.vectors
    }

    /// Number of vectors, `C(m+n, n)`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Never true: there is always at least one vector.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Probability of each vector under the null.
    pub fn probability(&self) -> f64 {
        1.0 / self.vectors.len() as f64
    }
}
