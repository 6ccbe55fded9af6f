//! Test statistics, p-values and decisions.
//!
//! Every se-block test is a function of the block frequencies alone. A
//! [`PreparedTest`] fixes the statistic, the sample sizes and the null
//! reference once, so repeated evaluation (power studies) costs only the
//! statistic. The free functions build a one-off [`PreparedTest`].

mod decision;
mod indicator;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::combinatorics::rational_to_f64;
use crate::error::{invalid, Error, Result};
use crate::nulldist::{
    dixon_c2, dixon_c2_null, empty_block_pmf, linear_rank_null, maximal_block_pmf, precedence_pmf,
    runs_pmf, score_sum, NullMethod, NullReference,
};
use crate::partition::{BlockFrequencies, PlanLabel};
use crate::scores::ScoreVector;
use crate::Sample;

pub use decision::{randomized_decision, Boundary, Decision, DecisionRule, RandomizedRule};
pub use indicator::IndicatorVector;

/// Tail(s) of the alternative hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    /// Small statistics are evidence against H0.
    Lower,
    /// Large statistics are evidence against H0.
    Upper,
    /// Both tails.
    TwoSided,
}

impl Alternative {
    /// Stable lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            Alternative::Lower => "lower",
            Alternative::Upper => "upper",
            Alternative::TwoSided => "two-sided",
        }
    }

    /// Picks the p-value for this alternative from the two tails.
    pub fn select(self, p_lower: f64, p_upper: f64) -> f64 {
        match self {
            Alternative::Lower => p_lower,
            Alternative::Upper => p_upper,
            Alternative::TwoSided => two_sided(p_lower, p_upper),
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "lower" | "less" => Ok(Alternative::Lower),
            "upper" | "greater" => Ok(Alternative::Upper),
            "two-sided" | "twosided" | "both" => Ok(Alternative::TwoSided),
            _ => Err(invalid(format!("unknown alternative '{s}'"))),
        }
    }
}

fn two_sided(p_lower: f64, p_upper: f64) -> f64 {
    (2.0 * p_lower.min(p_upper)).min(1.0)
}

/// Context recorded alongside a result.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestMeta {
    /// X sample size.
    pub m: u64,
    /// Y sample size.
    pub n: u64,
    /// Dimension, when the result came from raw data.
    pub dim: Option<usize>,
    /// Partition plan, when the result came from raw data.
    pub plan: Option<PlanLabel>,
    /// Seed of the Monte Carlo null or of the decision.
    pub seed: Option<u64>,
    /// X points that fell on a threshold.
    pub threshold_ties: usize,
}

/// Outcome of a test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    /// Observed statistic.
    pub statistic: f64,
    /// Name of the statistic.
    pub statistic_name: String,
    /// Null reference the p-values come from.
    pub null: NullReference,
    /// `P(T <= t)`.
    pub p_lower: f64,
    /// `P(T >= t)`.
    pub p_upper: f64,
    /// `min(1, 2 min(p_lower, p_upper))`.
    pub p_two_sided: f64,
    /// Designated alternative.
    pub alternative: Alternative,
    /// Rejection probability at the observed value, once a randomized
    /// decision has been taken.
    pub randomization_gamma: Option<f64>,
    /// Context.
    pub meta: TestMeta,
}

impl TestResult {
    /// The p-value for the designated alternative.
    pub fn p_value(&self) -> f64 {
        self.alternative.select(self.p_lower, self.p_upper)
    }

    /// Name of the null method.
    pub fn method(&self) -> &'static str {
        self.null.method_name()
    }

    /// Attaches raw-data context.
    pub fn with_context(mut self, dim: usize, plan: PlanLabel, threshold_ties: usize) -> Self {
        self.meta.dim = Some(dim);
        self.meta.plan = Some(plan);
        self.meta.threshold_ties = threshold_ties;
        self
    }
}

/// Which statistic of the block frequencies to compute.
#[derive(Debug, Clone, PartialEq)]
pub enum TestKind {
    /// `sum a_i Z_i`.
    LinearRank(ScoreVector),
    /// `T_j = R_1 + ... + R_j`.
    Precedence {
        /// Number of leading blocks, `1..=n`.
        j: usize,
    },
    /// `max(R_1, ..., R_j)`.
    MaximalBlock {
        /// Number of leading blocks, `1..=n+1`.
        j: usize,
    },
    /// Number of empty blocks.
    EmptyBlock,
    /// Dixon's `C^2`.
    DixonC2,
    /// Number of runs in the pooled ordering the frequencies encode.
    Runs,
}

impl TestKind {
    /// Name of the statistic.
    pub fn name(&self) -> String {
        match self {
            TestKind::LinearRank(s) => s.family().name().to_string(),
            TestKind::Precedence { .. } => "precedence".into(),
            TestKind::MaximalBlock { .. } => "maximal_block".into(),
            TestKind::EmptyBlock => "empty_block".into(),
            TestKind::DixonC2 => "dixon_c2".into(),
            TestKind::Runs => "runs".into(),
        }
    }

    /// The tail each test is naturally run against.
    pub fn default_alternative(&self) -> Alternative {
        match self {
            TestKind::LinearRank(_) | TestKind::Precedence { .. } => Alternative::TwoSided,
            TestKind::MaximalBlock { .. } | TestKind::EmptyBlock | TestKind::DixonC2 => {
                Alternative::Upper
            }
            TestKind::Runs => Alternative::Lower,
        }
    }

    /// The statistic for a frequency vector of matching shape.
    pub fn statistic(&self, freqs: &[u64]) -> f64 {
        match self {
            TestKind::LinearRank(s) => score_sum(freqs, s.as_slice()),
            TestKind::Precedence { j } => freqs[..*j].iter().sum::<u64>() as f64,
            TestKind::MaximalBlock { j } => freqs[..*j].iter().copied().max().unwrap_or(0) as f64,
            TestKind::EmptyBlock => freqs.iter().filter(|&&r| r == 0).count() as f64,
            TestKind::DixonC2 => dixon_c2(freqs),
            TestKind::Runs => runs_from_frequencies(freqs) as f64,
        }
    }
}

/// Runs in `X^{R_1} Y X^{R_2} Y ... Y X^{R_{n+1}}`.
pub fn runs_from_frequencies(freqs: &[u64]) -> u64 {
    let occupied = freqs.iter().filter(|&&r| r > 0).count() as u64;
    let interior = freqs[1..freqs.len() - 1].iter().filter(|&&r| r > 0).count() as u64;
    occupied + 1 + interior
}

/// A test with its null reference computed for fixed `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTest {
    kind: TestKind,
    m: u64,
    n: u64,
    alternative: Alternative,
    null: NullReference,
}

impl PreparedTest {
    /// Prepares `kind` for sizes `(m, n)`. `method` only matters for linear
    /// rank and Dixon statistics; the others always have closed forms.
    pub fn new(
        kind: TestKind,
        m: u64,
        n: u64,
        alternative: Alternative,
        method: NullMethod,
        cap: u64,
    ) -> Result<Self> {
        let exact = |pmf| NullReference::Exact(Arc::new(pmf));
        let null = match &kind {
            TestKind::LinearRank(scores) => {
                if scores.len() as u64 != m + n {
                    return Err(invalid(format!(
                        "score vector has length {} but m + n = {}",
                        scores.len(),
                        m + n
                    )));
                }
                linear_rank_null(m, n, scores.as_slice(), method, cap)?
            }
            TestKind::Precedence { j } => exact(precedence_pmf(m, n, *j)?),
            TestKind::MaximalBlock { j } => exact(maximal_block_pmf(m, n, *j)?),
            TestKind::EmptyBlock => exact(empty_block_pmf(m, n)?),
            TestKind::DixonC2 => dixon_c2_null(m, n, method, cap)?,
            TestKind::Runs => exact(runs_pmf(m, n)?),
        };
        Ok(Self {
            kind,
            m,
            n,
            alternative,
            null,
        })
    }

    /// The statistic.
    pub fn kind(&self) -> &TestKind {
        &self.kind
    }

    /// The null reference.
    pub fn null(&self) -> &NullReference {
        &self.null
    }

    /// The designated alternative.
    pub fn alternative(&self) -> Alternative {
        self.alternative
    }

    fn check(&self, freqs: &[u64]) -> Result<()> {
        if freqs.len() as u64 != self.n + 1 {
            return Err(invalid(format!(
                "expected {} block frequencies, got {}",
                self.n + 1,
                freqs.len()
            )));
        }
        let m: u64 = freqs.iter().sum();
        if m != self.m {
            return Err(invalid(format!(
                "frequencies sum to {m}, expected m = {}",
                self.m
            )));
        }
        Ok(())
    }

    /// Statistic only; panics on a frequency vector of the wrong shape.
    pub fn statistic(&self, freqs: &[u64]) -> f64 {
        self.kind.statistic(freqs)
    }

    /// Statistic and p-values.
    pub fn evaluate(&self, freqs: &BlockFrequencies) -> Result<TestResult> {
        let counts = freqs.counts();
        self.check(counts)?;
        let t = self.statistic(counts);
        let (p_lower, p_upper) = match &self.null {
            NullReference::Exact(pmf) => {
                (rational_to_f64(&pmf.cdf(t)), rational_to_f64(&pmf.sf(t)))
            }
            other => other.tails(t),
        };
        let (p_lower, p_upper) = (p_lower.clamp(0.0, 1.0), p_upper.clamp(0.0, 1.0));
        let seed = match &self.null {
            NullReference::Empirical(e) => Some(e.seed),
            _ => None,
        };
        Ok(TestResult {
            statistic: t,
            statistic_name: self.kind.name(),
            null: self.null.clone(),
            p_lower,
            p_upper,
            p_two_sided: two_sided(p_lower, p_upper),
            alternative: self.alternative,
            randomization_gamma: None,
            meta: TestMeta {
                m: self.m,
                n: self.n,
                seed,
                threshold_ties: freqs.threshold_ties(),
                ..TestMeta::default()
            },
        })
    }

    /// Decision rule at level `alpha`.
    pub fn rule(&self, alpha: f64) -> Result<DecisionRule> {
        DecisionRule::new(&self.null, self.alternative, alpha)
    }
}

fn one_off(
    kind: TestKind,
    freqs: &BlockFrequencies,
    alternative: Alternative,
    method: NullMethod,
    cap: u64,
) -> Result<TestResult> {
    PreparedTest::new(kind, freqs.m(), freqs.n(), alternative, method, cap)?.evaluate(freqs)
}

/// `U = sum_{i=0}^{n} i R_{i+1}`, the Mann-Whitney count of (Y, X) pairs
/// with the Y point below the X point.
pub fn mann_whitney_u(freqs: &[u64]) -> u64 {
    freqs.iter().enumerate().map(|(i, &r)| i as u64 * r).sum()
}

/// Linear rank test `sum a_i Z_i`.
pub fn linear_rank_test(
    freqs: &BlockFrequencies,
    scores: &ScoreVector,
    alternative: Alternative,
    method: NullMethod,
    cap: u64,
) -> Result<TestResult> {
    one_off(
        TestKind::LinearRank(scores.clone()),
        freqs,
        alternative,
        method,
        cap,
    )
}

/// Precedence test on `T_j`.
pub fn precedence_test(
    freqs: &BlockFrequencies,
    j: usize,
    alternative: Alternative,
) -> Result<TestResult> {
    one_off(
        TestKind::Precedence { j },
        freqs,
        alternative,
        NullMethod::Exact,
        0,
    )
}

/// Maximal block test, upper tail.
pub fn maximal_block_test(freqs: &BlockFrequencies, j: usize) -> Result<TestResult> {
    one_off(
        TestKind::MaximalBlock { j },
        freqs,
        Alternative::Upper,
        NullMethod::Exact,
        0,
    )
}

/// Empty block test, upper tail.
pub fn empty_block_test(freqs: &BlockFrequencies) -> Result<TestResult> {
    one_off(
        TestKind::EmptyBlock,
        freqs,
        Alternative::Upper,
        NullMethod::Exact,
        0,
    )
}

/// Dixon's test, upper tail.
pub fn dixon_c2_test(freqs: &BlockFrequencies, method: NullMethod, cap: u64) -> Result<TestResult> {
    one_off(TestKind::DixonC2, freqs, Alternative::Upper, method, cap)
}

/// Classical runs test on two univariate samples, lower tail.
pub fn runs_test(x: &Sample, y: &Sample) -> Result<TestResult> {
    let freqs = univariate_frequencies(x, y)?;
    Ok(one_off(
        TestKind::Runs,
        &freqs,
        Alternative::Lower,
        NullMethod::Exact,
        0,
    )?
    .with_context(1, PlanLabel::UnivariateAsc, 0))
}

/// Counts of X points between consecutive Y order statistics, refusing
/// ties across the samples.
pub fn univariate_frequencies(x: &Sample, y: &Sample) -> Result<BlockFrequencies> {
    if x.dim() != 1 || y.dim() != 1 {
        return Err(invalid(
            "the runs test is univariate; both samples need one column",
        ));
    }
    if x.is_empty() || y.is_empty() {
        return Err(invalid("both samples need at least one observation"));
    }
    // (value, is_y, index)
    let mut pooled: Vec<(f64, bool, usize)> = x
        .as_flat()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, false, i))
        .chain(y.as_flat().iter().enumerate().map(|(i, &v)| (v, true, i)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for w in pooled.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
            return Err(Error::CrossSampleTie {
                x_index: w[0].2,
                y_index: w[1].2,
                value: w[0].0,
            });
        }
    }
    let mut counts = Vec::with_capacity(y.len() + 1);
    let mut run = 0u64;
    for &(_, is_y, _) in &pooled {
        if is_y {
            counts.push(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    counts.push(run);
    BlockFrequencies::new(counts)
}

/// First X point that coincides with a Y point in every coordinate.
///
/// Such a pair makes the rank of the X point among the Y points undefined,
/// whatever the plan.
pub fn find_cross_sample_duplicate(x: &Sample, y: &Sample) -> Option<(usize, usize)> {
    if x.dim() != y.dim() {
        return None;
    }
    let lex = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.partial_cmp(v).unwrap_or(core::cmp::Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    };
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| lex(y.point(a), y.point(b)));
    x.iter().enumerate().find_map(|(i, p)| {
        order
            .binary_search_by(|&k| lex(y.point(k), p))
            .ok()
            .map(|pos| (i, order[pos]))
    })
}
