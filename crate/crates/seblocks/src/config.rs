//! Power-study configuration files.
//!
//! ```toml
//! m = 200
//! n = 200
//! p = 3
//! alpha = 0.05
//! replicates = 1000
//! seed = 20240611
//!
//! [[study]]
//! scenario = "alt3"
//! c = [2.0, 2.5]
//! tests = ["rs", "eb"]
//! plans = ["spiral", "stairstep"]
//! ```
//!
//! Top-level keys are defaults that each `[[study]]` table may override.

use std::ops::Range;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;
use toml::Spanned;

use seblocks_core::partition::PlanLabel;
use seblocks_core::DEFAULT_ENUMERATION_CAP;

use crate::catalog::{parse_plan, TestName};
use crate::simulate::{Scenario, ScenarioSpec, StudyConfig, StudyTest};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Keys allowed both at top level and in a `[[study]]` table.
macro_rules! with_shared_keys {
    ($(#[$meta:meta])* struct $name:ident { $($extra:tt)* }) => {
        $(#[$meta])*
        struct $name {
            m: Option<Spanned<usize>>,
            n: Option<Spanned<usize>>,
            p: Option<Spanned<usize>>,
            alpha: Option<Spanned<f64>>,
            replicates: Option<Spanned<u64>>,
            seed: Option<u64>,
            randomize_roles: Option<bool>,
            permute_columns: Option<bool>,
            null_draws: Option<Spanned<u64>>,
            $($extra)*
        }
    };
}

with_shared_keys! {
    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawFile {
        threads: Option<Spanned<usize>>,
        #[serde(default)]
        study: Vec<Spanned<RawStudy>>,
    }
}

with_shared_keys! {
    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawStudy {
        scenario: Spanned<String>,
        #[serde(default)]
        c: Option<Spanned<OneOrMany<f64>>>,
        tests: Spanned<Vec<Spanned<String>>>,
        #[serde(alias = "plan")]
        plans: Option<Spanned<OneOrMany<String>>>,
    }
}

/// A parsed configuration: one study per `(study table, c)` pair.
#[derive(Debug, Clone)]
pub struct PowerPlan {
    /// Studies in file order.
    pub studies: Vec<StudyConfig>,
    /// Worker threads requested by the file.
    pub threads: Option<usize>,
}

struct Source<'a> {
    name: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn err(&self, span: Range<usize>, msg: impl std::fmt::Display) -> anyhow::Error {
        anyhow!("{}:{}: {msg}", self.name, self.line(span))
    }
}

fn pick<T: Copy>(
    over: &Option<Spanned<T>>,
    base: &Option<Spanned<T>>,
) -> Option<(T, Range<usize>)> {
    over.as_ref()
        .or(base.as_ref())
        .map(|s| (*s.get_ref(), s.span()))
}

/// Parses configuration text; `name` labels error messages.
pub fn parse_config(text: &str, name: &str) -> Result<PowerPlan> {
    let src = Source { name, text };
    let raw: RawFile = toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => src.err(span, e.message()),
        None => anyhow!("{name}: {}", e.message()),
    })?;
    if let Some(t) = &raw.threads {
        if *t.get_ref() == 0 {
            return Err(src.err(t.span(), "threads must be at least 1"));
        }
    }
    if raw.study.is_empty() {
        return Err(anyhow!("{name}: no [[study]] tables"));
    }
    let base = &raw;
    let mut studies = Vec::new();
    for st in &raw.study {
        let study_span = st.span();
        let st = st.get_ref();
        let need = |v: Option<(usize, Range<usize>)>, key: &str| {
            v.ok_or_else(|| src.err(study_span.clone(), format!("missing '{key}'")))
        };
        let (m, _) = need(pick(&st.m, &base.m), "m")?;
        let (n, _) = need(pick(&st.n, &base.n), "n")?;
        let (p, p_span) = need(pick(&st.p, &base.p), "p")?;
        if p == 0 {
            return Err(src.err(p_span, "p must be at least 1"));
        }
        let (alpha, alpha_span) =
            pick(&st.alpha, &base.alpha).unwrap_or((0.05, study_span.clone()));
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(src.err(alpha_span, format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let (replicates, rep_span) = pick(&st.replicates, &base.replicates)
            .ok_or_else(|| src.err(study_span.clone(), "missing 'replicates'"))?;
        if replicates == 0 {
            return Err(src.err(rep_span, "replicates must be at least 1"));
        }
        let seed = st.seed.or(base.seed).unwrap_or(0);
        let null_draws = pick(&st.null_draws, &base.null_draws).map_or(100_000, |v| v.0);

        let scenario: Scenario = st
            .scenario
            .get_ref()
            .parse()
            .map_err(|e| src.err(st.scenario.span(), e))?;
        let cs = match (&st.c, scenario) {
            (Some(c), _) => c.get_ref().to_vec(),
            (None, Scenario::Null) => vec![0.0],
            (None, _) => return Err(src.err(study_span.clone(), "missing 'c'")),
        };
        let c_span = st.c.as_ref().map_or(study_span.clone(), |c| c.span());
        if cs.is_empty() {
            return Err(src.err(c_span, "'c' is empty"));
        }
        let tests = st
            .tests
            .get_ref()
            .iter()
            .map(|t| {
                t.get_ref()
                    .parse::<TestName>()
                    .map_err(|e| src.err(t.span(), e))
            })
            .collect::<Result<Vec<_>>>()?;
        if tests.is_empty() {
            return Err(src.err(st.tests.span(), "'tests' is empty"));
        }
        let plans: Vec<PlanLabel> = match &st.plans {
            Some(ps) => ps
                .get_ref()
                .to_vec()
                .iter()
                .map(|s| parse_plan(s).map_err(|e| src.err(ps.span(), e)))
                .collect::<Result<_>>()?,
            None if p == 1 => vec![PlanLabel::UnivariateAsc],
            None => vec![PlanLabel::Spiral],
        };
        let mut schedule = Vec::new();
        for &test in &tests {
            for &plan in &plans {
                schedule.push(StudyTest { test, plan });
            }
        }
        for c in cs {
            let spec =
                ScenarioSpec::new(scenario, c, p, m, n).map_err(|e| src.err(c_span.clone(), e))?;
            let mut cfg = StudyConfig::new(spec, schedule.clone(), alpha, replicates, seed);
            cfg.randomize_roles = st.randomize_roles.or(base.randomize_roles).unwrap_or(true);
            cfg.permute_columns = st.permute_columns.or(base.permute_columns).unwrap_or(true);
            cfg.null_draws = null_draws;
            cfg.cap = DEFAULT_ENUMERATION_CAP;
            studies.push(cfg);
        }
    }
    Ok(PowerPlan {
        studies,
        threads: raw.threads.map(|t| t.into_inner()),
    })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<PowerPlan> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
m = 20
n = 15
p = 3
replicates = 50
seed = 9

[[study]]
scenario = "alt3"
c = [1.5, 2.0]
tests = ["rs", "mb"]
plans = ["spiral", "ss"]

[[study]]
scenario = "null"
tests = ["eb"]
replicates = 10
p = 1
"#;

    #[test]
    fn expands_cells() {
        let plan = parse_config(GOOD, "g.toml").unwrap();
        assert_eq!(plan.studies.len(), 3);
        assert_eq!(plan.studies[0].tests.len(), 4);
        assert_eq!(plan.studies[1].spec.c, 2.0);
        assert_eq!(plan.studies[0].seed, 9);
        assert_eq!(plan.studies[2].replicates, 10);
        assert_eq!(plan.studies[2].spec.p, 1);
        assert_eq!(plan.studies[2].tests[0].plan, PlanLabel::UnivariateAsc);
        assert_eq!(plan.studies[0].alpha, 0.05);
    }

    #[test]
    fn zero_replicates_reports_its_line() {
        let text = "m = 5\nn = 5\np = 2\nreplicates = 0\n[[study]]\nscenario = \"null\"\ntests = [\"rs\"]\n";
        let e = parse_config(text, "z.toml").unwrap_err().to_string();
        assert_eq!(e, "z.toml:4: replicates must be at least 1");
    }

    #[test]
    fn bad_names_report_their_line() {
        let text = "m = 5\nn = 5\np = 2\nreplicates = 3\n[[study]]\nscenario = \"null\"\ntests = [\"rs\",\n \"bogus\"]\n";
        let e = parse_config(text, "b.toml").unwrap_err().to_string();
        assert!(
            e.starts_with("b.toml:8:") && e.contains("unknown test 'bogus'"),
            "{e}"
        );
        let text = "m = 5\nn = 5\np = 2\nreplicates = 3\n[[study]]\nscenario = \"alt9\"\nc = 1\ntests = [\"rs\"]\n";
        let e = parse_config(text, "b.toml").unwrap_err().to_string();
        assert!(e.starts_with("b.toml:6:"), "{e}");
    }

    #[test]
    fn syntax_and_unknown_keys() {
        let e = parse_config("m = 5\nn = = 3\n", "s.toml")
            .unwrap_err()
            .to_string();
        assert!(e.starts_with("s.toml:2:"), "{e}");
        let e = parse_config("m = 5\nbogus = 1\n", "s.toml")
            .unwrap_err()
            .to_string();
        assert!(e.contains("bogus"), "{e}");
    }

    #[test]
    fn parameter_errors() {
        let text = "m = 5\nn = 5\np = 2\nreplicates = 3\n[[study]]\nscenario = \"alt5\"\nc = 2.0\ntests = [\"rs\"]\n";
        let e = parse_config(text, "c.toml").unwrap_err().to_string();
        assert!(e.starts_with("c.toml:7:"), "{e}");
    }

    #[test]
    fn shipped_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                load_config(&path).unwrap();
            }
        }
    }
}
