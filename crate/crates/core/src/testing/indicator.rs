use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Membership of the pooled ordering: `1` for an X point, `0` for a Y point.
///
/// Block frequencies determine it completely: the zeros sit at positions
/// `R_1 + 1, R_1 + R_2 + 2, ..., R_1 + ... + R_n + n` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndicatorVector {
    z: Vec<u8>,
    m: u64,
    n: u64,
}

impl IndicatorVector {
    /// Builds `Z` from block frequencies `(R_1, ..., R_{n+1})`.
    pub fn from_frequencies(freqs: &[u64]) -> Result<Self> {
        if freqs.len() < 2 {
            return Err(invalid("need at least two blocks"));
        }
        let n = (freqs.len() - 1) as u64;
        let m: u64 = freqs.iter().sum();
        let mut z = Vec::with_capacity((m + n) as usize);
        for (i, &r) in freqs.iter().enumerate() {
            z.extend(core::iter::repeat_n(1u8, r as usize));
            if i + 1 < freqs.len() {
                z.push(0);
            }
        }
        Ok(Self { z, m, n })
    }

    /// Wraps a 0/1 vector.
    pub fn from_bits(z: Vec<u8>) -> Result<Self> {
        if z.iter().any(|&b| b > 1) {
            return Err(invalid("indicator entries must be 0 or 1"));
        }
        let m = z.iter().filter(|&&b| b == 1).count() as u64;
        let n = z.len() as u64 - m;
        if n == 0 {
            return Err(invalid("indicator vector needs at least one zero"));
        }
        Ok(Self { z, m, n })
    }

    /// The entries.
    pub fn as_slice(&self) -> &[u8] {
        &self.z
    }

    /// Number of ones.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Number of zeros.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Recovers `(R_1, ..., R_{n+1})`.
    pub fn to_frequencies(&self) -> Vec<u64> {
        let mut freqs = Vec::with_capacity(self.n as usize + 1);
        let mut run = 0u64;
        for &b in &self.z {
            if b == 1 {
                run += 1;
            } else {
                freqs.push(run);
                run = 0;
            }
        }
        freqs.push(run);
        freqs
    }

    /// `sum a_i Z_i`.
    pub fn dot(&self, scores: &[f64]) -> Result<f64> {
        if scores.len() != self.z.len() {
            return Err(invalid("score vector length must equal m + n"));
        }
        Ok(self
            .z
            .iter()
            .zip(scores)
            .filter(|(b, _)| **b == 1)
            .map(|(_, a)| a)
            .sum())
    }
}
