//! Brute-force null distributions.
//!
//! Each function walks every equally likely frequency vector and tallies the
//! statistic. Nothing here shares code with the closed forms in the parent
//! module, so the two can witness each other.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use super::enumerate::for_each_frequency_vector;
use crate::error::{invalid, Result};

/// Exact counts of a statistic over all `C(m+n, n)` frequency vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally<K: Ord> {
    /// Number of vectors visited.
    pub total: u64,
    /// Vectors per statistic value; zero counts are absent.
    pub counts: BTreeMap<K, u64>,
}

impl<K: Ord + Clone> Tally<K> {
    fn collect(m: u64, n: u64, cap: u64, mut stat: impl FnMut(&[u64]) -> K) -> Result<Self> {
        let mut counts = BTreeMap::new();
        let total = for_each_frequency_vector(m, n, cap, |v| {
            *counts.entry(stat(v)).or_insert(0u64) += 1;
        })?;
        Ok(Self { total, counts })
    }

    /// Probability of `key` as an exact rational.
    pub fn probability(&self, key: &K) -> BigRational {
        let c = self.counts.get(key).copied().unwrap_or(0);
        BigRational::new(BigInt::from(c), BigInt::from(BigUint::from(self.total)))
    }
}

/// Points in the first `j` blocks.
pub fn precedence(m: u64, n: u64, j: usize, cap: u64) -> Result<Tally<i64>> {
    if j == 0 || j as u64 > n {
        return Err(invalid("precedence needs 1 <= j <= n"));
    }
    Tally::collect(m, n, cap, |v| v[..j].iter().sum::<u64>() as i64)
}

/// Number of empty blocks.
pub fn empty_blocks(m: u64, n: u64, cap: u64) -> Result<Tally<i64>> {
    Tally::collect(m, n, cap, |v| v.iter().filter(|&&r| r == 0).count() as i64)
}

/// Largest count among the first `j` blocks.
pub fn maximal_block(m: u64, n: u64, j: usize, cap: u64) -> Result<Tally<i64>> {
    if j == 0 || j as u64 > n + 1 {
        return Err(invalid("maximal block needs 1 <= j <= n + 1"));
    }
    Tally::collect(m, n, cap, |v| {
        v[..j].iter().copied().max().unwrap_or(0) as i64
    })
}

/// Runs in the pooled univariate ordering the frequencies encode.
pub fn runs(m: u64, n: u64, cap: u64) -> Result<Tally<i64>> {
    Tally::collect(m, n, cap, |v| {
        let mut labels = Vec::new();
        for (i, &r) in v.iter().enumerate() {
            labels.extend(core::iter::repeat_n(true, r as usize));
            if i + 1 < v.len() {
                labels.push(false);
            }
        }
        1 + labels.windows(2).filter(|w| w[0] != w[1]).count() as i64
    })
}

/// Joint counts of (empty interior blocks, empty exterior blocks).
pub fn interior_exterior(m: u64, n: u64, cap: u64) -> Result<Tally<(i64, i64)>> {
    if n < 2 {
        return Err(invalid("interior blocks need n >= 2"));
    }
    Tally::collect(m, n, cap, |v| {
        let last = v.len() - 1;
        let interior = v[1..last].iter().filter(|&&r| r == 0).count() as i64;
        let exterior = i64::from(v[0] == 0) + i64::from(v[last] == 0);
        (interior, exterior)
    })
}

/// Counts of the first `j` frequencies taking the values in `r`.
pub fn joint_block(m: u64, n: u64, r: &[u64], cap: u64) -> Result<BigRational> {
    let j = r.len();
    if j == 0 || j as u64 > n + 1 {
        return Err(invalid("joint block mass needs 1 <= j <= n + 1"));
    }
    let t = Tally::collect(m, n, cap, |v| v[..j] == *r)?;
    Ok(t.probability(&true))
}

/// Sum of pooled ranks of the comparison sample.
pub fn rank_sum(m: u64, n: u64, cap: u64) -> Result<Tally<i64>> {
    Tally::collect(m, n, cap, |v| {
        let mut rank = 0i64;
        let mut w = 0i64;
        for (i, &r) in v.iter().enumerate() {
            for _ in 0..r {
                rank += 1;
                w += rank;
            }
            if i + 1 < v.len() {
                rank += 1;
            }
        }
        w
    })
}

/// `m^2 (n+1)^2` times Dixon's statistic, which is an integer.
pub fn dixon_scaled(m: u64, n: u64, cap: u64) -> Result<Tally<u128>> {
    Tally::collect(m, n, cap, |v| {
        v.iter()
            .map(|&r| {
                let d = m as i128 - (n as i128 + 1) * r as i128;
                (d * d) as u128
            })
            .sum()
    })
}
