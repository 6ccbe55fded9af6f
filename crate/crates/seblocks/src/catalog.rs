//! Names of the shipped tests and plans, and how to build them.

use std::fmt;
use std::str::FromStr;

use seblocks_core::nulldist::{vector_count, NullMethod, NullReference, Statistic};
use seblocks_core::partition::{Direction, PartitionPlan, PlanLabel};
use seblocks_core::scores::{make_scores, ScoreFamily};
use seblocks_core::testing::{Alternative, DecisionRule, PreparedTest, TestKind};
use seblocks_core::{Error, Result};

/// A test as named on the command line and in study configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestName {
    /// Linear rank test with a named score family.
    LinearRank(ScoreFamily),
    /// Precedence test; `None` picks `floor((n + 1) / 2)`.
    Precedence(Option<usize>),
    /// Maximal block test; `None` picks `n + 1`.
    MaximalBlock(Option<usize>),
    /// Empty block test.
    EmptyBlock,
    /// Dixon's test.
    DixonC2,
    /// Runs test.
    Runs,
}

impl TestName {
    /// Short label used in result tables (`RS`, `TH`, `MB`, ...).
    pub fn label(&self) -> String {
        let with_j = |base: &str, j: &Option<usize>| match j {
            Some(j) => format!("{base}[j={j}]"),
            None => base.to_string(),
        };
        match self {
            TestName::LinearRank(f) => match f {
                ScoreFamily::Wilcoxon => "RS",
                ScoreFamily::VanDerWaerden => "VdW",
                ScoreFamily::TerryHoeffding => "TH",
                ScoreFamily::Mood => "Mood",
                ScoreFamily::Klotz => "Klotz",
                ScoreFamily::SiegelTukey => "ST",
                ScoreFamily::Custom => "Custom",
            }
            .to_string(),
            TestName::Precedence(j) => with_j("Prec", j),
            TestName::MaximalBlock(j) => with_j("MB", j),
            TestName::EmptyBlock => "EB".into(),
            TestName::DixonC2 => "Dixon".into(),
            TestName::Runs => "Runs".into(),
        }
    }

    /// The `j` actually used for sizes `n`.
    pub fn resolved_j(&self, n: usize) -> Option<usize> {
        match self {
            TestName::Precedence(j) => Some(j.unwrap_or(n.div_ceil(2)).max(1)),
            TestName::MaximalBlock(j) => Some(j.unwrap_or(n + 1)),
            _ => None,
        }
    }

    /// The statistic for sizes `(m, n)`.
    pub fn kind(&self, m: usize, n: usize) -> Result<TestKind> {
        Ok(match self {
            TestName::LinearRank(f) => TestKind::LinearRank(make_scores(*f, m, n)?),
            TestName::Precedence(_) => TestKind::Precedence {
                j: self.resolved_j(n).unwrap_or(1),
            },
            TestName::MaximalBlock(_) => TestKind::MaximalBlock {
                j: self.resolved_j(n).unwrap_or(1),
            },
            TestName::EmptyBlock => TestKind::EmptyBlock,
            TestName::DixonC2 => TestKind::DixonC2,
            TestName::Runs => TestKind::Runs,
        })
    }
}

impl fmt::Display for TestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for TestName {
    type Err = Error;

    /// Accepts `wilcoxon`, `rs`, `vdw`, `th`, `mood`, `klotz`,
    /// `siegel_tukey`, `precedence`, `prec:3`, `mb`, `maximal_block:7`,
    /// `eb`, `dixon`, `runs` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let (head, j) = match s.split_once([':', '=']) {
            Some((h, j)) => {
                let j = j
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad j in test name '{s}'")))?;
                (h, Some(j))
            }
            None => (s, None),
        };
        let key: String = head
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let name = match key.as_str() {
            "precedence" | "prec" => TestName::Precedence(j),
            "maximalblock" | "mb" | "maxblock" => TestName::MaximalBlock(j),
            "emptyblock" | "eb" => TestName::EmptyBlock,
            "dixon" | "dixonc2" | "c2" => TestName::DixonC2,
            "runs" => TestName::Runs,
            _ => TestName::LinearRank(head.parse::<ScoreFamily>().map_err(|_| {
                Error::InvalidArgument(format!(
                    "unknown test '{s}' (expected wilcoxon, vdw, th, mood, klotz, siegel_tukey, precedence, \
                     maximal_block, empty_block, dixon or runs)"
                ))
            })?),
        };
        if j.is_some() && !matches!(name, TestName::Precedence(_) | TestName::MaximalBlock(_)) {
            return Err(Error::InvalidArgument(format!("test '{head}' takes no j")));
        }
        Ok(name)
    }
}

/// Parses a plan name: `spiral`/`sp`, `stairstep`/`ss`, `univariate`.
pub fn parse_plan(s: &str) -> Result<PlanLabel> {
    let key: String = s
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    match key.as_str() {
        "spiral" | "sp" => Ok(PlanLabel::Spiral),
        "stairstep" | "ss" | "stair" => Ok(PlanLabel::StairStep),
        "univariate" | "uni" | "ascending" => Ok(PlanLabel::UnivariateAsc),
        "descending" => Ok(PlanLabel::UnivariateDesc),
        _ => Err(Error::InvalidArgument(format!(
            "unknown plan '{s}' (expected spiral, stairstep or univariate)"
        ))),
    }
}

/// Short plan label used in result tables.
pub fn plan_short(label: PlanLabel) -> &'static str {
    match label {
        PlanLabel::Spiral => "Sp",
        PlanLabel::StairStep => "SS",
        PlanLabel::UnivariateAsc => "Asc",
        PlanLabel::UnivariateDesc => "Desc",
        PlanLabel::Custom => "Custom",
    }
}

/// The default plan of each label: the unpaired spiral and the ascending
/// stair-step.
pub fn make_plan(label: PlanLabel, dim: usize, n: usize) -> Result<PartitionPlan> {
    match label {
        PlanLabel::Spiral => PartitionPlan::spiral(dim, n, false),
        PlanLabel::StairStep => PartitionPlan::stair_step(dim, n, Direction::Min, false),
        PlanLabel::UnivariateAsc | PlanLabel::UnivariateDesc if dim != 1 => Err(
            Error::InvalidArgument(format!("the univariate plan needs one column, got {dim}")),
        ),
        PlanLabel::UnivariateAsc => PartitionPlan::univariate(n, true),
        PlanLabel::UnivariateDesc => PartitionPlan::univariate(n, false),
        PlanLabel::Custom => Err(Error::InvalidArgument(
            "custom plans cannot be built by name".into(),
        )),
    }
}

/// Null method used when the caller does not choose one: exact while the
/// enumeration fits under `cap`, otherwise normal moments for linear rank
/// statistics and Monte Carlo for Dixon's statistic.
pub fn auto_method(
    name: &TestName,
    m: usize,
    n: usize,
    cap: u64,
    mc_draws: u64,
    seed: u64,
) -> NullMethod {
    let fits = vector_count(m as u64, n as u64) <= cap;
    match name {
        TestName::LinearRank(ScoreFamily::Wilcoxon) => NullMethod::Exact,
        TestName::LinearRank(_) if !fits => NullMethod::Normal,
        TestName::DixonC2 if !fits => NullMethod::MonteCarlo {
            replicates: mc_draws,
            seed,
        },
        _ => NullMethod::Exact,
    }
}

/// A prepared test with its level-`alpha` decision rule.
#[derive(Debug, Clone)]
pub struct CalibratedTest {
    /// The test.
    pub test: PreparedTest,
    /// Its decision rule.
    pub rule: DecisionRule,
}

/// Prepares `name` for `(m, n)` with a decision rule at `alpha`.
///
/// Monte Carlo nulls are turned into a discrete law so the rule is still
/// randomized; normal nulls give a deterministic `p <= alpha` rule.
pub fn calibrate(
    name: &TestName,
    m: usize,
    n: usize,
    alternative: Option<Alternative>,
    method: NullMethod,
    alpha: f64,
    cap: u64,
) -> Result<CalibratedTest> {
    let kind = name.kind(m, n)?;
    let alternative = alternative.unwrap_or_else(|| kind.default_alternative());
    let test = PreparedTest::new(kind, m as u64, n as u64, alternative, method, cap)?;
    let rule = match test.null() {
        NullReference::Empirical(e) => {
            let statistic = match name {
                TestName::DixonC2 => Statistic::DixonC2,
                _ => Statistic::LinearRank,
            };
            let pmf = e.to_pmf(statistic, m as u64, n as u64);
            DecisionRule::new(
                &NullReference::Exact(std::sync::Arc::new(pmf)),
                alternative,
                alpha,
            )?
        }
        other => DecisionRule::new(other, alternative, alpha)?,
    };
    Ok(CalibratedTest { test, rule })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_test_names() {
        assert_eq!(
            "RS".parse::<TestName>().unwrap(),
            TestName::LinearRank(ScoreFamily::Wilcoxon)
        );
        assert_eq!(
            "th".parse::<TestName>().unwrap(),
            TestName::LinearRank(ScoreFamily::TerryHoeffding)
        );
        assert_eq!(
            "prec:3".parse::<TestName>().unwrap(),
            TestName::Precedence(Some(3))
        );
        assert_eq!(
            "maximal_block".parse::<TestName>().unwrap(),
            TestName::MaximalBlock(None)
        );
        assert_eq!("EB".parse::<TestName>().unwrap(), TestName::EmptyBlock);
        assert!("eb:2".parse::<TestName>().is_err());
        assert!("nope".parse::<TestName>().is_err());
    }

    #[test]
    fn default_j() {
        assert_eq!(TestName::Precedence(None).resolved_j(6), Some(3));
        assert_eq!(TestName::Precedence(None).resolved_j(200), Some(100));
        assert_eq!(TestName::MaximalBlock(None).resolved_j(6), Some(7));
    }

    #[test]
    fn plans_by_name() {
        assert_eq!(parse_plan("Sp").unwrap(), PlanLabel::Spiral);
        assert_eq!(parse_plan("stair-step").unwrap(), PlanLabel::StairStep);
        assert!(make_plan(PlanLabel::UnivariateAsc, 2, 4).is_err());
        assert_eq!(make_plan(PlanLabel::Spiral, 3, 5).unwrap().cuts().len(), 5);
    }

    #[test]
    fn auto_method_falls_back() {
        let th = TestName::LinearRank(ScoreFamily::TerryHoeffding);
        assert_eq!(auto_method(&th, 8, 6, 1_000_000, 10, 0), NullMethod::Exact);
        assert_eq!(
            auto_method(&th, 50, 50, 1_000_000, 10, 0),
            NullMethod::Normal
        );
        let rs = TestName::LinearRank(ScoreFamily::Wilcoxon);
        assert_eq!(
            auto_method(&rs, 50, 50, 1_000_000, 10, 0),
            NullMethod::Exact
        );
    }
}
