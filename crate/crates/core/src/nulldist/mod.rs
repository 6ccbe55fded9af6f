//! Exact null distributions of block-frequency statistics.
//!
//! Under identical continuous populations each of the `C(m+n, n)` frequency
//! vectors has probability `1/C(m+n, n)`. The mass functions below are the
//! closed forms that follow from that fact, computed with arbitrary-precision
//! integers and held as exact rationals. [`oracle`] recomputes each of them
//! by enumeration.

pub mod enumerate;
pub mod oracle;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::combinatorics::{binomial, ratio, rational_to_f64, BinomialTable};
use crate::error::{invalid, Result};
use crate::rng::random_subset;
pub use enumerate::{
    check_capacity, for_each_frequency_vector, vector_count, FrequencyEnumeration,
};

/// Which statistic a [`Pmf`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// Points in the first `j` blocks.
    Precedence {
        /// Number of leading blocks.
        j: usize,
    },
    /// Number of empty blocks.
    EmptyBlock,
    /// Largest frequency among the first `j` blocks.
    MaximalBlock {
        /// Number of leading blocks.
        j: usize,
    },
    /// Runs in the pooled univariate ordering.
    Runs,
    /// Dixon's sum of squared deviations of block proportions.
    DixonC2,
    /// A linear rank statistic `sum a_i Z_i`.
    LinearRank,
}

impl Statistic {
    /// Stable snake_case name.
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Precedence { .. } => "precedence",
            Statistic::EmptyBlock => "empty_block",
            Statistic::MaximalBlock { .. } => "maximal_block",
            Statistic::Runs => "runs",
            Statistic::DixonC2 => "dixon_c2",
            Statistic::LinearRank => "linear_rank",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Precedence { j } | Statistic::MaximalBlock { j } => {
                write!(f, "{}(j={j})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

/// A finite probability mass function with exact rational probabilities.
///
/// Values are ascending and distinct. Integer-valued statistics are stored
/// exactly; real-valued ones (Dixon's statistic, linear rank statistics)
/// carry the `f64` nearest each atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    statistic: Statistic,
    m: u64,
    n: u64,
    values: Vec<f64>,
    probs: Vec<BigRational>,
    probs_f64: Vec<f64>,
}

impl Pmf {
    fn new(statistic: Statistic, m: u64, n: u64, atoms: Vec<(f64, BigRational)>) -> Self {
        let (values, probs): (Vec<f64>, Vec<BigRational>) = atoms.into_iter().unzip();
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        let probs_f64 = probs.iter().map(rational_to_f64).collect();
        Self {
            statistic,
            m,
            n,
            values,
            probs,
            probs_f64,
        }
    }

    fn from_counts(
        statistic: Statistic,
        m: u64,
        n: u64,
        atoms: Vec<(f64, BigUint)>,
        total: &BigUint,
    ) -> Self {
        let atoms = atoms
            .into_iter()
            .map(|(v, c)| (v, ratio(c, total)))
            .collect();
        Self::new(statistic, m, n, atoms)
    }

    /// The statistic described.
    pub fn statistic(&self) -> Statistic {
        self.statistic
    }

    /// Comparison-sample size.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Reference-sample size.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Support points, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact probabilities aligned with [`Pmf::values`].
    pub fn probabilities(&self) -> &[BigRational] {
        &self.probs
    }

    /// Probabilities rendered to `f64`.
    pub fn probabilities_f64(&self) -> &[f64] {
        &self.probs_f64
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True for an empty support, which no constructor produces.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of all probabilities; exactly one for every constructor here.
    pub fn total(&self) -> BigRational {
        self.probs
            .iter()
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// Exact probability of an integer value, zero off the support.
    pub fn prob(&self, value: i64) -> BigRational {
        self.position(value as f64)
            .map(|i| self.probs[i].clone())
            .unwrap_or_else(BigRational::zero)
    }

    fn tolerance(t: f64) -> f64 {
        1e-9 * (1.0 + t.abs())
    }

    fn position(&self, t: f64) -> Option<usize> {
        let tol = Self::tolerance(t);
        let i = self.values.partition_point(|&v| v < t - tol);
        (i < self.values.len() && self.values[i] <= t + tol).then_some(i)
    }

    /// Index of the first atom `>= t` (within a relative tolerance of `1e-9`).
    fn lower_index(&self, t: f64) -> usize {
        let tol = Self::tolerance(t);
        self.values.partition_point(|&v| v < t - tol)
    }

    /// Index one past the last atom `<= t` (same tolerance).
    fn upper_index(&self, t: f64) -> usize {
        let tol = Self::tolerance(t);
        self.values.partition_point(|&v| v <= t + tol)
    }

    /// `P(T <= t)` exactly.
    pub fn cdf(&self, t: f64) -> BigRational {
        self.probs[..self.upper_index(t)]
            .iter()
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// `P(T >= t)` exactly.
    pub fn sf(&self, t: f64) -> BigRational {
        self.probs[self.lower_index(t)..]
            .iter()
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// `P(T <= t)` in floating point.
    pub fn cdf_f64(&self, t: f64) -> f64 {
        self.probs_f64[..self.upper_index(t)]
            .iter()
            .sum::<f64>()
            .min(1.0)
    }

    /// `P(T >= t)` in floating point.
    pub fn sf_f64(&self, t: f64) -> f64 {
        self.probs_f64[self.lower_index(t)..]
            .iter()
            .sum::<f64>()
            .min(1.0)
    }

    /// Mean in floating point.
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs_f64)
            .map(|(v, p)| v * p)
            .sum()
    }

    /// Exact agreement with a brute-force tally: every atom with positive
    /// probability equals `count / total` and no other value occurs.
    pub fn matches_tally(&self, tally: &oracle::Tally<i64>) -> bool {
        let total = BigInt::from(tally.total);
        let positive: Vec<(i64, &BigRational)> = self
            .values
            .iter()
            .zip(&self.probs)
            .filter(|(_, p)| !p.is_zero())
            .map(|(v, p)| (*v as i64, p))
            .collect();
        positive.len() == tally.counts.len()
            && positive.iter().zip(&tally.counts).all(|((v, p), (k, c))| {
                v == k && **p == BigRational::new(BigInt::from(*c), total.clone())
            })
    }
}

fn check_mn(m: u64, n: u64) -> Result<()> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(())
}

fn total_vectors(m: u64, n: u64) -> BigUint {
    binomial((m + n) as i64, n as i64)
}

/// Null mass function of `T_j`, the count in the first `j` blocks (negative
/// hypergeometric): `P(T_j = t) = C(t+j-1, t) C(m-t+n-j, m-t) / C(m+n, n)`.
pub fn precedence_pmf(m: u64, n: u64, j: usize) -> Result<Pmf> {
    check_mn(m, n)?;
    if j == 0 || j as u64 > n {
        return Err(invalid(format!(
            "precedence needs 1 <= j <= n, got j={j}, n={n}"
        )));
    }
    let (mi, ni, ji) = (m as i64, n as i64, j as i64);
    let total = total_vectors(m, n);
    let atoms = (0..=mi)
        .map(|t| {
            let c = binomial(t + ji - 1, t) * binomial(mi - t + ni - ji, mi - t);
            (t as f64, c)
        })
        .collect();
    Ok(Pmf::from_counts(
        Statistic::Precedence { j },
        m,
        n,
        atoms,
        &total,
    ))
}

/// Null mass function of the number of empty blocks `S_0`:
/// `P(S_0 = s) = C(n+1, s) C(m-1, n-s) / C(m+n, n)` for
/// `max(0, n+1-m) <= s <= n`.
pub fn empty_block_pmf(m: u64, n: u64) -> Result<Pmf> {
    check_mn(m, n)?;
    let (mi, ni) = (m as i64, n as i64);
    let total = total_vectors(m, n);
    let low = (ni + 1 - mi).max(0);
    let atoms = (low..=ni)
        .map(|s| (s as f64, binomial(ni + 1, s) * binomial(mi - 1, ni - s)))
        .collect();
    Ok(Pmf::from_counts(Statistic::EmptyBlock, m, n, atoms, &total))
}

/// Probability that the first `r.len()` block frequencies equal `r`.
pub fn joint_block_pmf(m: u64, n: u64, r: &[u64]) -> Result<BigRational> {
    check_mn(m, n)?;
    let j = r.len() as u64;
    if j == 0 || j > n + 1 {
        return Err(invalid(format!(
            "joint block mass needs 1 <= j <= n + 1, got j={j}"
        )));
    }
    let s: u64 = r.iter().sum();
    if s > m {
        return Err(invalid(format!("frequencies sum to {s} but m = {m}")));
    }
    let total = total_vectors(m, n);
    let count = if j == n + 1 {
        if s == m {
            BigUint::one()
        } else {
            BigUint::zero()
        }
    } else {
        binomial((m + n - s - j) as i64, (n - j) as i64)
    };
    Ok(ratio(count, &total))
}

/// Number of ordered `j`-tuples of integers in `0..=r` summing to `s`, by
/// inclusion-exclusion on the entries that exceed `r`.
fn bounded_compositions(table: &BinomialTable, j: i64, s: i64, r: i64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut k = 0;
    while k <= j && k * (r + 1) <= s {
        let term = table.get_int(j, k) * table.get_int(s - k * (r + 1) + j - 1, j - 1);
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        k += 1;
    }
    acc
}

/// Null mass function of the largest frequency among the first `j` blocks.
///
/// Works through the cumulative form
/// `P(max <= r) = sum_s N_j(s, r) C(m+n-s-j, n-j) / C(m+n, n)`, where
/// `N_j(s, r)` counts bounded compositions, instead of summing over every
/// achievable `j`-tuple. When `j = n + 1` the tuple is the whole vector and
/// `s` is pinned to `m`.
pub fn maximal_block_pmf(m: u64, n: u64, j: usize) -> Result<Pmf> {
    check_mn(m, n)?;
    if j == 0 || j as u64 > n + 1 {
        return Err(invalid(format!(
            "maximal block needs 1 <= j <= n + 1, got j={j}, n={n}"
        )));
    }
    let (mi, ni, ji) = (m as i64, n as i64, j as i64);
    let table = BinomialTable::new((m + n) as usize + j);
    let total = total_vectors(m, n);
    let whole_vector = ji == ni + 1;
    let cumulative = |r: i64| -> BigInt {
        if whole_vector {
            bounded_compositions(&table, ji, mi, r)
        } else {
            (0..=mi)
                .map(|s| {
                    bounded_compositions(&table, ji, s, r)
                        * table.get_int(mi + ni - s - ji, ni - ji)
                })
                .fold(BigInt::zero(), |acc, x| acc + x)
        }
    };
    let low = if whole_vector { (mi + ji - 1) / ji } else { 0 };
    let mut prev = if low == 0 {
        BigInt::zero()
    } else {
        cumulative(low - 1)
    };
    let total_int = BigInt::from(total.clone());
    let mut atoms = Vec::with_capacity((mi - low + 1) as usize);
    for r in low..=mi {
        let cur = cumulative(r);
        let count = &cur - &prev;
        debug_assert!(!count.is_negative());
        atoms.push((r as f64, BigRational::new(count, total_int.clone())));
        prev = cur;
    }
    Ok(Pmf::new(Statistic::MaximalBlock { j }, m, n, atoms))
}

/// Null mass function of the number of runs `U` in the pooled univariate
/// sample, for `u = 2, ..., min(2n+1, 2m+1, m+n)`.
pub fn runs_pmf(m: u64, n: u64) -> Result<Pmf> {
    check_mn(m, n)?;
    let (mi, ni) = (m as i64, n as i64);
    let total = total_vectors(m, n);
    let top = (2 * ni + 1).min(2 * mi + 1).min(mi + ni);
    let atoms = (2..=top)
        .map(|u| {
            let c = if u % 2 == 0 {
                let k = u / 2 - 1;
                binomial(mi - 1, k) * binomial(ni - 1, k) * 2u32
            } else {
                let (a, b) = ((u - 1) / 2, (u - 3) / 2);
                binomial(mi - 1, a) * binomial(ni - 1, b)
                    + binomial(mi - 1, b) * binomial(ni - 1, a)
            };
            (u as f64, c)
        })
        .collect();
    Ok(Pmf::from_counts(Statistic::Runs, m, n, atoms, &total))
}

/// Joint law of empty interior blocks (`B_2..B_n`) and empty exterior blocks
/// (`B_1`, `B_{n+1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    m: u64,
    n: u64,
    cells: BTreeMap<(u64, u64), BigRational>,
}

impl JointPmf {
    /// `P(S_IN = s_in, S_EX = s_ex)`, zero off the support.
    pub fn prob(&self, s_in: i64, s_ex: i64) -> BigRational {
        if s_in < 0 || s_ex < 0 {
            return BigRational::zero();
        }
        self.cells
            .get(&(s_in as u64, s_ex as u64))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Support cells `((s_in, s_ex), probability)` in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = (&(u64, u64), &BigRational)> {
        self.cells.iter()
    }

    /// Sum of all cells.
    pub fn total(&self) -> BigRational {
        self.cells
            .values()
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// Comparison-sample size.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Reference-sample size.
    pub fn n(&self) -> u64 {
        self.n
    }
}

/// Joint null mass function of `(S_IN, S_EX)`:
/// `C(2, s_ex) C(n-1, s_in) C(m-1, n-s_in-s_ex) / C(m+n, n)`.
pub fn interior_exterior_empty_pmf(m: u64, n: u64) -> Result<JointPmf> {
    check_mn(m, n)?;
    if n < 2 {
        return Err(invalid("interior blocks exist only for n >= 2"));
    }
    let (mi, ni) = (m as i64, n as i64);
    let total = total_vectors(m, n);
    let low = (ni + 1 - mi).max(0);
    let mut cells = BTreeMap::new();
    for s_in in 0..ni {
        for s_ex in 0..=2i64 {
            let s = s_in + s_ex;
            if s < low || s > ni {
                continue;
            }
            let c = binomial(2, s_ex) * binomial(ni - 1, s_in) * binomial(mi - 1, ni - s);
            cells.insert((s_in as u64, s_ex as u64), ratio(c, &total));
        }
    }
    Ok(JointPmf { m, n, cells })
}

/// Exact null of the Wilcoxon rank sum `W = m(m+1)/2 + U` for any sizes.
///
/// The counts of the Mann-Whitney `U` are the coefficients of the Gaussian
/// binomial `[m+n choose n]_q = prod_{i=1..n} (1 - q^{m+i}) / (1 - q^i)`,
/// expanded one factor at a time in big integers.
pub fn rank_sum_pmf(m: u64, n: u64) -> Result<Pmf> {
    check_mn(m, n)?;
    let (mu, nu) = (m as usize, n as usize);
    let mut poly: Vec<BigInt> = vec![BigInt::one()];
    for i in 1..=nu {
        let shift = mu + i;
        poly.resize(poly.len() + shift, BigInt::zero());
        for d in (shift..poly.len()).rev() {
            let (lo, hi) = poly.split_at_mut(d);
            hi[0] -= &lo[d - shift];
        }
        for d in i..poly.len() {
            let (lo, hi) = poly.split_at_mut(d);
            hi[0] += &lo[d - i];
        }
        poly.truncate(i * mu + 1);
    }
    let offset = (m * (m + 1) / 2) as f64;
    let total = BigInt::from(total_vectors(m, n));
    let atoms = poly
        .into_iter()
        .enumerate()
        .map(|(u, c)| (offset + u as f64, BigRational::new(c, total.clone())))
        .collect();
    Ok(Pmf::new(Statistic::LinearRank, m, n, atoms))
}

/// How a null reference distribution is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullMethod {
    /// Complete enumeration (or an equivalent exact recursion).
    Exact,
    /// Seeded Monte Carlo draws from the uniform frequency-vector law.
    MonteCarlo {
        /// Number of draws.
        replicates: u64,
        /// Generator seed.
        seed: u64,
    },
    /// Normal approximation from exact moments.
    Normal,
}

impl NullMethod {
    /// Stable lowercase name.
    pub fn name(&self) -> &'static str {
        match self {
            NullMethod::Exact => "exact",
            NullMethod::MonteCarlo { .. } => "monte_carlo",
            NullMethod::Normal => "normal",
        }
    }
}

/// An empirical null distribution from seeded draws.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalNull {
    /// Draws, ascending.
    pub draws: Vec<f64>,
    /// Seed used.
    pub seed: u64,
}

impl EmpiricalNull {
    fn new(mut draws: Vec<f64>, seed: u64) -> Self {
        draws.sort_by(f64::total_cmp);
        Self { draws, seed }
    }

    /// `(#{draws <= t} + 1) / (B + 1)`.
    pub fn p_lower(&self, t: f64) -> f64 {
        let tol = 1e-9 * (1.0 + t.abs());
        let k = self.draws.partition_point(|&v| v <= t + tol);
        (k as f64 + 1.0) / (self.draws.len() as f64 + 1.0)
    }

    /// The draws as a discrete law with probabilities `count / B`, so a
    /// randomized rule can be calibrated against the simulated null.
    pub fn to_pmf(&self, statistic: Statistic, m: u64, n: u64) -> Pmf {
        let total = BigUint::from(self.draws.len());
        let atoms = group_sums(self.draws.clone())
            .into_iter()
            .map(|(v, c)| (v, BigUint::from(c)))
            .collect();
        Pmf::from_counts(statistic, m, n, atoms, &total)
    }

    /// `(#{draws >= t} + 1) / (B + 1)`.
    pub fn p_upper(&self, t: f64) -> f64 {
        let tol = 1e-9 * (1.0 + t.abs());
        let k = self.draws.len() - self.draws.partition_point(|&v| v < t - tol);
        (k as f64 + 1.0) / (self.draws.len() as f64 + 1.0)
    }
}

/// Mean and variance of a normal approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalNull {
    /// Exact null mean.
    pub mean: f64,
    /// Exact null variance.
    pub variance: f64,
}

/// A null reference for a statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum NullReference {
    /// Exact discrete distribution.
    Exact(alloc::sync::Arc<Pmf>),
    /// Monte Carlo draws.
    Empirical(alloc::sync::Arc<EmpiricalNull>),
    /// Normal approximation.
    Normal(NormalNull),
}

impl NullReference {
    /// The method that produced this reference.
    pub fn method_name(&self) -> &'static str {
        match self {
            NullReference::Exact(_) => "exact",
            NullReference::Empirical(_) => "monte_carlo",
            NullReference::Normal(_) => "normal",
        }
    }

    /// `(P(T <= t), P(T >= t))`.
    pub fn tails(&self, t: f64) -> (f64, f64) {
        match self {
            NullReference::Exact(p) => (p.cdf_f64(t), p.sf_f64(t)),
            NullReference::Empirical(e) => (e.p_lower(t), e.p_upper(t)),
            NullReference::Normal(nn) => {
                if nn.variance <= 0.0 {
                    let lower = if t >= nn.mean - 1e-12 { 1.0 } else { 0.0 };
                    let upper = if t <= nn.mean + 1e-12 { 1.0 } else { 0.0 };
                    return (lower, upper);
                }
                let z = (t - nn.mean) / libm::sqrt(nn.variance);
                (
                    crate::special::normal_cdf(z),
                    crate::special::normal_cdf(-z),
                )
            }
        }
    }
}

/// Mean and variance of `sum a_i Z_i` from the moments of the indicator
/// vector: `E[Z_i] = m/N`, `Var[Z_i] = mn/N^2`, `Cov = -mn/(N^2 (N-1))`.
pub fn linear_rank_moments(m: u64, n: u64, scores: &[f64]) -> NormalNull {
    let big_n = (m + n) as f64;
    let (m, n) = (m as f64, n as f64);
    let sum: f64 = scores.iter().sum();
    let sum_sq: f64 = scores.iter().map(|a| a * a).sum();
    let mean = m / big_n * sum;
    let variance = if big_n > 1.0 {
        (m * n / (big_n * big_n * (big_n - 1.0)) * (big_n * sum_sq - sum * sum)).max(0.0)
    } else {
        0.0
    };
    NormalNull { mean, variance }
}

fn is_wilcoxon(scores: &[f64]) -> bool {
    scores.iter().enumerate().all(|(i, &a)| a == (i + 1) as f64)
}

/// Groups nearly equal sums; floating-point addition of the same multiset of
/// scores in different orders can differ in the last bits.
fn group_sums(mut sums: Vec<f64>) -> Vec<(f64, u64)> {
    sums.sort_by(f64::total_cmp);
    let scale = sums.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-10 * (1.0 + scale);
    let mut out: Vec<(f64, u64)> = Vec::new();
    let mut start = f64::NEG_INFINITY;
    for v in sums {
        match out.last_mut() {
            Some((_, c)) if v - start <= tol => *c += 1,
            _ => {
                start = v;
                out.push((v, 1));
            }
        }
    }
    out
}

/// Null reference for `T = sum a_i Z_i` with `N = m + n` scores.
///
/// `Exact` enumerates all `C(N, n)` arrangements (refusing past `cap`),
/// except for Wilcoxon scores `1..=N`, whose exact law comes from
/// [`rank_sum_pmf`] at any size.
pub fn linear_rank_null(
    m: u64,
    n: u64,
    scores: &[f64],
    method: NullMethod,
    cap: u64,
) -> Result<NullReference> {
    check_mn(m, n)?;
    let big_n = (m + n) as usize;
    if scores.len() != big_n {
        return Err(invalid(format!(
            "expected {big_n} scores, got {}",
            scores.len()
        )));
    }
    if scores.iter().any(|a| !a.is_finite()) {
        return Err(invalid("scores must be finite"));
    }
    match method {
        NullMethod::Normal => Ok(NullReference::Normal(linear_rank_moments(m, n, scores))),
        NullMethod::Exact if is_wilcoxon(scores) => Ok(NullReference::Exact(
            alloc::sync::Arc::new(rank_sum_pmf(m, n)?),
        )),
        NullMethod::Exact => {
            let mut sums = Vec::new();
            let total = for_each_frequency_vector(m, n, cap, |v| sums.push(score_sum(v, scores)))?;
            let total = BigUint::from(total);
            let atoms = group_sums(sums)
                .into_iter()
                .map(|(v, c)| (v, BigUint::from(c)))
                .collect();
            Ok(NullReference::Exact(alloc::sync::Arc::new(
                Pmf::from_counts(Statistic::LinearRank, m, n, atoms, &total),
            )))
        }
        NullMethod::MonteCarlo { replicates, seed } => {
            if replicates == 0 {
                return Err(invalid("Monte Carlo needs at least one replicate"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut flags = vec![false; big_n];
            let draws = (0..replicates)
                .map(|_| {
                    random_subset(&mut rng, &mut flags, m as usize);
                    flags
                        .iter()
                        .zip(scores)
                        .filter(|(f, _)| **f)
                        .map(|(_, a)| a)
                        .sum()
                })
                .collect();
            Ok(NullReference::Empirical(alloc::sync::Arc::new(
                EmpiricalNull::new(draws, seed),
            )))
        }
    }
}

/// `sum a_i Z_i` for the arrangement a frequency vector encodes.
pub(crate) fn score_sum(freqs: &[u64], scores: &[f64]) -> f64 {
    let mut pos = 0usize;
    let mut t = 0.0;
    for (i, &r) in freqs.iter().enumerate() {
        for _ in 0..r {
            t += scores[pos];
            pos += 1;
        }
        if i + 1 < freqs.len() {
            pos += 1;
        }
    }
    t
}

/// `m^2 (n+1)^2 C^2 = sum_i (m - (n+1) R_i)^2`, an integer.
pub fn dixon_scaled(freqs: &[u64]) -> u128 {
    let m: u64 = freqs.iter().sum();
    let k = freqs.len() as i128;
    freqs
        .iter()
        .map(|&r| {
            let d = m as i128 - k * r as i128;
            (d * d) as u128
        })
        .sum()
}

/// Dixon's `C^2 = sum_i (1/(n+1) - R_i/m)^2`.
pub fn dixon_c2(freqs: &[u64]) -> f64 {
    let m: u64 = freqs.iter().sum();
    let k = freqs.len() as f64;
    if m == 0 {
        return f64::NAN;
    }
    dixon_scaled(freqs) as f64 / ((m as f64) * (m as f64) * k * k)
}

/// Null reference for Dixon's statistic, exact or by sampling uniform
/// frequency vectors.
pub fn dixon_c2_null(m: u64, n: u64, method: NullMethod, cap: u64) -> Result<NullReference> {
    check_mn(m, n)?;
    match method {
        NullMethod::Exact => {
            let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
            let total = for_each_frequency_vector(m, n, cap, |v| {
                *counts.entry(dixon_scaled(v)).or_insert(0) += 1;
            })?;
            let denom = (m as f64) * (m as f64) * ((n + 1) as f64) * ((n + 1) as f64);
            let total = BigUint::from(total);
            let atoms = counts
                .into_iter()
                .map(|(d, c)| (d as f64 / denom, BigUint::from(c)))
                .collect();
            Ok(NullReference::Exact(alloc::sync::Arc::new(
                Pmf::from_counts(Statistic::DixonC2, m, n, atoms, &total),
            )))
        }
        NullMethod::MonteCarlo { replicates, seed } => {
            if replicates == 0 {
                return Err(invalid("Monte Carlo needs at least one replicate"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut flags = vec![false; (m + n) as usize];
            let mut freqs = vec![0u64; n as usize + 1];
            let draws = (0..replicates)
                .map(|_| {
                    random_subset(&mut rng, &mut flags, m as usize);
                    freqs.iter_mut().for_each(|r| *r = 0);
                    let mut block = 0;
                    for &is_x in &flags {
                        if is_x {
                            freqs[block] += 1;
                        } else {
                            block += 1;
                        }
                    }
                    dixon_c2(&freqs)
                })
                .collect();
            Ok(NullReference::Empirical(alloc::sync::Arc::new(
                EmpiricalNull::new(draws, seed),
            )))
        }
        NullMethod::Normal => Err(invalid(
            "Dixon's statistic has no normal approximation here",
        )),
    }
}

#[cfg(test)]
mod tests;
