use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use super::{Alternative, TestResult};
use crate::combinatorics::rational_to_f64;
use crate::error::{invalid, Result};
use crate::nulldist::{NullReference, Pmf};
use crate::rng::uniform01;

/// Critical atom of one tail and the probability of rejecting on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    /// The critical value `c`.
    pub critical: f64,
    /// Rejection probability when `T = c`.
    pub gamma: f64,
    gamma_exact: BigRational,
}

/// Randomized test of exact size `alpha` for a discrete null.
///
/// Two-sided rules spend `alpha / 2` on each tail.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedRule {
    alternative: Alternative,
    lower: Option<Boundary>,
    upper: Option<Boundary>,
}

fn exact_level(alpha: f64) -> Result<BigRational> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha must lie in (0, 1)"));
    }
    BigRational::from_float(alpha).ok_or_else(|| invalid("alpha must be finite"))
}

/// Walks atoms from the extreme inward until the tail would exceed `level`.
/// A tail within `1e-12` (relative) of `level` counts as reaching it, so an
/// `alpha` typed as a decimal still lands on an achievable tail exactly.
fn boundary<'a>(
    atoms: impl Iterator<Item = (&'a f64, &'a BigRational)>,
    level: &BigRational,
) -> Boundary {
    let slack = level / BigRational::from_integer(BigInt::from(1_000_000_000_000u64));
    let mut strict = BigRational::zero();
    let mut last = None;
    for (v, p) in atoms {
        if p.is_zero() {
            continue;
        }
        let with = &strict + p;
        if with > level + &slack {
            let gamma_exact = ((level - &strict) / p).max(BigRational::zero());
            return Boundary {
                critical: *v,
                gamma: rational_to_f64(&gamma_exact),
                gamma_exact,
            };
        }
        strict = with;
        last = Some(*v);
    }
    // level >= 1: every atom rejects outright
    Boundary {
        critical: last.unwrap_or(0.0),
        gamma: 1.0,
        gamma_exact: BigRational::one(),
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
}

impl RandomizedRule {
    /// Rule for `alternative` at level `alpha` against `pmf`.
    pub fn new(pmf: &Pmf, alternative: Alternative, alpha: f64) -> Result<Self> {
        let level = exact_level(alpha)?;
        let half = &level / BigRational::from_integer(BigInt::from(2));
        let atoms = || pmf.values().iter().zip(pmf.probabilities());
        let (lower, upper) = match alternative {
            Alternative::Lower => (Some(boundary(atoms(), &level)), None),
            Alternative::Upper => (None, Some(boundary(atoms().rev(), &level))),
            Alternative::TwoSided => (
                Some(boundary(atoms(), &half)),
                Some(boundary(atoms().rev(), &half)),
            ),
        };
        Ok(Self {
            alternative,
            lower,
            upper,
        })
    }

    /// The alternative the rule guards against.
    pub fn alternative(&self) -> Alternative {
        self.alternative
    }

    /// Lower-tail boundary, if any.
    pub fn lower(&self) -> Option<&Boundary> {
        self.lower.as_ref()
    }

    /// Upper-tail boundary, if any.
    pub fn upper(&self) -> Option<&Boundary> {
        self.upper.as_ref()
    }

    fn tail_parts(&self, t: f64) -> (bool, Option<&Boundary>, Option<&Boundary>) {
        let mut certain = false;
        let mut lo = None;
        let mut hi = None;
        if let Some(b) = &self.lower {
            if near(t, b.critical) {
                lo = Some(b);
            } else if t < b.critical {
                certain = true;
            }
        }
        if let Some(b) = &self.upper {
            if near(t, b.critical) {
                hi = Some(b);
            } else if t > b.critical {
                certain = true;
            }
        }
        (certain, lo, hi)
    }

    /// Probability of rejecting when the statistic equals `t`.
    pub fn reject_probability(&self, t: f64) -> f64 {
        match self.tail_parts(t) {
            (true, _, _) => 1.0,
            (false, lo, hi) => (lo.map_or(0.0, |b| b.gamma) + hi.map_or(0.0, |b| b.gamma)).min(1.0),
        }
    }

    fn reject_probability_exact(&self, t: f64) -> BigRational {
        match self.tail_parts(t) {
            (true, _, _) => BigRational::one(),
            (false, lo, hi) => {
                let zero = BigRational::zero();
                let sum = lo.map_or(zero.clone(), |b| b.gamma_exact.clone())
                    + hi.map_or(zero, |b| b.gamma_exact.clone());
                sum.min(BigRational::one())
            }
        }
    }

    /// Rejects when `u < reject_probability(t)`, with `u` uniform on `[0, 1)`.
    pub fn decide(&self, t: f64, u: f64) -> bool {
        u < self.reject_probability(t)
    }

    /// `sum_t P(T = t) * reject_probability(t)` in exact arithmetic.
    pub fn exact_size(&self, pmf: &Pmf) -> BigRational {
        pmf.values()
            .iter()
            .zip(pmf.probabilities())
            .fold(BigRational::zero(), |acc, (v, p)| {
                acc + p * self.reject_probability_exact(*v)
            })
    }
}

/// A decision rule for any null reference: randomized for exact nulls,
/// `p <= alpha` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum DecisionRule {
    /// Exact-size randomized rule.
    Randomized(RandomizedRule),
    /// Deterministic comparison of the p-value against `alpha`.
    PValue {
        /// Null reference the p-value comes from.
        null: NullReference,
        /// Tail(s) tested.
        alternative: Alternative,
        /// Level.
        alpha: f64,
    },
}

impl DecisionRule {
    /// Picks the rule matching `null`.
    pub fn new(null: &NullReference, alternative: Alternative, alpha: f64) -> Result<Self> {
        exact_level(alpha)?;
        Ok(match null {
            NullReference::Exact(pmf) => {
                DecisionRule::Randomized(RandomizedRule::new(pmf, alternative, alpha)?)
            }
            other => DecisionRule::PValue {
                null: other.clone(),
                alternative,
                alpha,
            },
        })
    }

    /// Decision for statistic `t`; `u` is only consulted by randomized rules.
    pub fn reject(&self, t: f64, u: f64) -> bool {
        match self {
            DecisionRule::Randomized(rule) => rule.decide(t, u),
            DecisionRule::PValue {
                null,
                alternative,
                alpha,
            } => {
                let (lo, hi) = null.tails(t);
                alternative.select(lo, hi) <= *alpha
            }
        }
    }

    /// Whether the rule attains exact size.
    pub fn is_randomized(&self) -> bool {
        matches!(self, DecisionRule::Randomized(_))
    }
}

/// Outcome of a randomized decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    /// Whether H0 is rejected.
    pub reject: bool,
    /// Rejection probability at the observed statistic (0 or 1 away from
    /// the critical atoms).
    pub gamma: f64,
}

/// Randomized exact-size decision for a result with an exact null.
pub fn randomized_decision(result: &TestResult, alpha: f64, seed: u64) -> Result<Decision> {
    let NullReference::Exact(pmf) = &result.null else {
        return Err(invalid(alloc::format!(
            "randomized decisions need an exact null, not {}",
            result.null.method_name()
        )));
    };
    let rule = RandomizedRule::new(pmf, result.alternative, alpha)?;
    let gamma = rule.reject_probability(result.statistic);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = uniform01(&mut rng);
    Ok(Decision {
        reject: u < gamma,
        gamma,
    })
}
