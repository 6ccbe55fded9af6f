//! Score vectors `a_1, ..., a_N` for linear rank statistics `sum a_i Z_i`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::special::{integrate, ln_gamma, normal_cdf, normal_quantile};

/// Named score families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreFamily {
    /// `a_i = i` (rank sum).
    Wilcoxon,
    /// Normal quantiles at `i / (N + 1)`.
    VanDerWaerden,
    /// Expected standard normal order statistics.
    TerryHoeffding,
    /// Squared distance from the middle rank.
    Mood,
    /// Squared van der Waerden scores.
    Klotz,
    /// Ranks assigned alternately from both extremes.
    SiegelTukey,
    /// Caller-supplied scores.
    Custom,
}

impl ScoreFamily {
    /// Stable snake_case name.
    pub fn name(self) -> &'static str {
        match self {
            ScoreFamily::Wilcoxon => "wilcoxon",
            ScoreFamily::VanDerWaerden => "van_der_waerden",
            ScoreFamily::TerryHoeffding => "terry_hoeffding",
            ScoreFamily::Mood => "mood",
            ScoreFamily::Klotz => "klotz",
            ScoreFamily::SiegelTukey => "siegel_tukey",
            ScoreFamily::Custom => "custom",
        }
    }
}

impl fmt::Display for ScoreFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: alloc::string::String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Ok(match key.as_str() {
            "wilcoxon" | "ranksum" | "rs" => ScoreFamily::Wilcoxon,
            "vanderwaerden" | "vdw" => ScoreFamily::VanDerWaerden,
            "terryhoeffding" | "th" | "normalscores" => ScoreFamily::TerryHoeffding,
            "mood" => ScoreFamily::Mood,
            "klotz" => ScoreFamily::Klotz,
            "siegeltukey" | "st" => ScoreFamily::SiegelTukey,
            _ => return Err(invalid(format!("unknown score family '{s}'"))),
        })
    }
}

/// Scores for the pooled positions `1..=N`, lowest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
    family: ScoreFamily,
}

impl ScoreVector {
    /// Wraps caller-supplied scores.
    pub fn custom(scores: Vec<f64>) -> Result<Self> {
        if scores.len() < 2 {
            return Err(invalid("need at least two scores"));
        }
        if scores.iter().any(|a| !a.is_finite()) {
            return Err(invalid("scores must be finite"));
        }
        Ok(Self {
            scores,
            family: ScoreFamily::Custom,
        })
    }

    /// The scores.
    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }

    /// Which family produced them.
    pub fn family(&self) -> ScoreFamily {
        self.family
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    /// Never true for a valid vector.
    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Builds the score vector of `family` for `N = m + n` pooled positions.
pub fn make_scores(family: ScoreFamily, m: usize, n: usize) -> Result<ScoreVector> {
    let big_n = m + n;
    if big_n < 2 {
        return Err(invalid("m + n must be at least 2"));
    }
    let quantile = |i: usize| normal_quantile(i as f64 / (big_n + 1) as f64);
    let scores = match family {
        ScoreFamily::Wilcoxon => (1..=big_n).map(|i| i as f64).collect(),
        ScoreFamily::VanDerWaerden => (1..=big_n).map(quantile).collect(),
        ScoreFamily::Klotz => (1..=big_n)
            .map(|i| {
                let q = quantile(i);
                q * q
            })
            .collect(),
        ScoreFamily::Mood => {
            let mid = (big_n + 1) as f64 / 2.0;
            (1..=big_n)
                .map(|i| {
                    let d = i as f64 - mid;
                    d * d
                })
                .collect()
        }
        ScoreFamily::TerryHoeffding => expected_normal_order_statistics(big_n),
        ScoreFamily::SiegelTukey => siegel_tukey(big_n),
        ScoreFamily::Custom => return Err(invalid("custom scores need explicit values")),
    };
    Ok(ScoreVector { scores, family })
}

/// `E[X_(i:N)]` for standard normal samples, by quadrature of
/// `i C(N, i) x phi(x) Phi(x)^(i-1) (1 - Phi(x))^(N-i)` in log space.
/// Antisymmetry fills the upper half.
pub fn expected_normal_order_statistics(big_n: usize) -> Vec<f64> {
    let nf = big_n as f64;
    let ln_root_two_pi = 0.5 * libm::log(2.0 * core::f64::consts::PI);
    let mut out = alloc::vec![0.0; big_n];
    for i in 1..=big_n / 2 {
        let below = (i - 1) as f64;
        let above = (big_n - i) as f64;
        let ln_coef = ln_gamma(nf + 1.0) - ln_gamma(i as f64) - ln_gamma(nf - i as f64 + 1.0);
        let integrand = |x: f64| {
            let lower = normal_cdf(x);
            let upper = normal_cdf(-x);
            if lower <= 0.0 || upper <= 0.0 {
                return 0.0;
            }
            let ln_weight = ln_coef + below * libm::log(lower) + above * libm::log(upper)
                - 0.5 * x * x
                - ln_root_two_pi;
            x * libm::exp(ln_weight)
        };
        let e = integrate(integrand, -12.0, 12.0, 96, 1e-12);
        out[i - 1] = e;
        out[big_n - i] = -e;
    }
    out
}

fn siegel_tukey(big_n: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; big_n];
    let (mut lo, mut hi) = (0usize, big_n - 1);
    let mut rank = 1.0;
    out[lo] = rank;
    lo += 1;
    let mut from_top = true;
    while lo <= hi {
        for _ in 0..2 {
            if lo > hi {
                break;
            }
            rank += 1.0;
            if from_top {
                out[hi] = rank;
                if hi == 0 {
                    break;
                }
                hi -= 1;
            } else {
                out[lo] = rank;
                lo += 1;
            }
        }
        from_top = !from_top;
    }
    out
}
