//! Serialized forms of test results, power estimates and null tables.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use seblocks_core::nulldist::{JointPmf, NullReference, Pmf};
use seblocks_core::testing::{Decision, TestResult};

use crate::simulate::{PowerEstimate, PowerReport};

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Pretty-printed JSON.
    Json,
    /// Aligned plain text.
    Table,
    /// Comma-separated values with a header row.
    Csv,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "table" | "text" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(anyhow!("unknown output format '{s}'")),
        }
    }
}

/// The JSON object written for one test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    /// Test label, e.g. `RS` or `Prec[j=3]`.
    pub test: String,
    /// Statistic name.
    pub statistic_name: String,
    /// Observed statistic.
    pub statistic: f64,
    /// `lower`, `upper` or `two-sided`.
    pub alternative: String,
    /// p-value for the designated alternative.
    pub p_value: f64,
    /// `P(T <= t)`.
    pub p_lower: f64,
    /// `P(T >= t)`.
    pub p_upper: f64,
    /// `min(1, 2 min(p_lower, p_upper))`.
    pub p_two_sided: f64,
    /// `exact`, `monte_carlo` or `normal`.
    pub method: String,
    /// Monte Carlo draws behind the null, if any.
    pub null_replicates: Option<u64>,
    /// Seed of the Monte Carlo null or the randomized decision.
    pub seed: Option<u64>,
    /// Partition plan, when computed from raw data.
    pub plan: Option<String>,
    /// Size of the counted sample.
    pub m: u64,
    /// Size of the partitioning sample.
    pub n: u64,
    /// Dimension, when computed from raw data.
    pub p: Option<usize>,
    /// Block frequencies.
    pub frequencies: Vec<u64>,
    /// Counted points lying exactly on a threshold.
    pub threshold_ties: usize,
    /// Level, when a decision was requested.
    pub alpha: Option<f64>,
    /// Decision, when requested.
    pub reject: Option<bool>,
    /// Rejection probability at the observed statistic.
    pub gamma: Option<f64>,
}

impl TestReport {
    /// Report for `result` computed from `frequencies`.
    pub fn new(label: &str, result: &TestResult, frequencies: &[u64]) -> Self {
        let (null_replicates, null_seed) = match &result.null {
            NullReference::Empirical(e) => (Some(e.draws.len() as u64), Some(e.seed)),
            _ => (None, None),
        };
        Self {
            test: label.to_string(),
            statistic_name: result.statistic_name.clone(),
            statistic: result.statistic,
            alternative: result.alternative.name().to_string(),
            p_value: result.p_value(),
            p_lower: result.p_lower,
            p_upper: result.p_upper,
            p_two_sided: result.p_two_sided,
            method: result.method().to_string(),
            null_replicates,
            seed: result.meta.seed.or(null_seed),
            plan: result.meta.plan.map(|p| p.as_str().to_string()),
            m: result.meta.m,
            n: result.meta.n,
            p: result.meta.dim,
            frequencies: frequencies.to_vec(),
            threshold_ties: result.meta.threshold_ties,
            alpha: None,
            reject: None,
            gamma: result.randomization_gamma,
        }
    }

    /// Records a decision at `alpha`.
    pub fn with_decision(
        mut self,
        alpha: f64,
        reject: bool,
        gamma: Option<f64>,
        seed: Option<u64>,
    ) -> Self {
        self.alpha = Some(alpha);
        self.reject = Some(reject);
        self.gamma = gamma;
        if seed.is_some() {
            self.seed = seed;
        }
        self
    }

    /// Records a randomized decision.
    pub fn with_randomized(self, alpha: f64, d: Decision, seed: u64) -> Self {
        self.with_decision(alpha, d.reject, Some(d.gamma), Some(seed))
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            ("test", self.test.clone()),
            ("statistic_name", self.statistic_name.clone()),
            ("statistic", self.statistic.to_string()),
            ("alternative", self.alternative.clone()),
            ("p_value", self.p_value.to_string()),
            ("p_lower", self.p_lower.to_string()),
            ("p_upper", self.p_upper.to_string()),
            ("p_two_sided", self.p_two_sided.to_string()),
            ("method", self.method.clone()),
            (
                "null_replicates",
                opt(self.null_replicates.map(|v| v.to_string())),
            ),
            ("seed", opt(self.seed.map(|v| v.to_string()))),
            ("plan", opt(self.plan.clone())),
            ("m", self.m.to_string()),
            ("n", self.n.to_string()),
            ("p", opt(self.p.map(|v| v.to_string()))),
            (
                "frequencies",
                self.frequencies
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            ("threshold_ties", self.threshold_ties.to_string()),
            ("alpha", opt(self.alpha.map(|v| v.to_string()))),
            ("reject", opt(self.reject.map(|v| v.to_string()))),
            ("gamma", opt(self.gamma.map(|v| v.to_string()))),
        ]
    }

    /// Renders the report.
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            OutputFormat::Table => {
                let fields = self.fields();
                let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut out = String::new();
                for (k, v) in fields.iter().filter(|(_, v)| !v.is_empty()) {
                    writeln!(out, "{k:<width$}  {v}")?;
                }
                Ok(out)
            }
            OutputFormat::Csv => {
                let fields = self.fields();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(fields.iter().map(|(k, _)| *k))?;
                w.write_record(fields.iter().map(|(_, v)| v.as_str()))?;
                Ok(String::from_utf8(w.into_inner()?)?)
            }
        }
    }
}

const POWER_COLUMNS: [&str; 15] = [
    "scenario",
    "c",
    "p",
    "m",
    "n",
    "test",
    "plan",
    "alpha",
    "replicates",
    "rejections",
    "rejection_rate",
    "std_error",
    "seed",
    "method",
    "randomized",
];

fn power_row(e: &PowerEstimate) -> [String; 15] {
    [
        e.scenario.to_string(),
        e.c.to_string(),
        e.p.to_string(),
        e.m.to_string(),
        e.n.to_string(),
        e.test.clone(),
        e.plan.clone(),
        e.alpha.to_string(),
        e.replicates.to_string(),
        e.rejections.to_string(),
        format!("{:.6}", e.rejection_rate),
        format!("{:.6}", e.std_error),
        e.seed.to_string(),
        e.method.clone(),
        e.randomized.to_string(),
    ]
}

/// Renders power estimates: one row per (scenario, c, test, plan).
pub fn render_power(report: &PowerReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(POWER_COLUMNS)?;
            for e in &report.estimates {
                w.write_record(power_row(e))?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        OutputFormat::Table => {
            let mut out = String::new();
            writeln!(
                out,
                "{:<8} {:>6} {:>3} {:>5} {:>5} {:<18} {:>8} {:>8}  method",
                "scenario", "c", "p", "m", "n", "test", "power", "se"
            )?;
            for e in &report.estimates {
                writeln!(
                    out,
                    "{:<8} {:>6} {:>3} {:>5} {:>5} {:<18} {:>8.4} {:>8.4}  {}",
                    e.scenario.to_string(),
                    e.c,
                    e.p,
                    e.m,
                    e.n,
                    e.test,
                    e.rejection_rate,
                    e.std_error,
                    e.method
                )?;
            }
            writeln!(out, "tie retries: {}", report.tie_retries)?;
            Ok(out)
        }
    }
}

/// Writes rows of `(keys, probability)` under `key_names` followed by
/// `numerator,denominator,probability`.
pub fn rational_rows_csv<'a>(
    key_names: &[&str],
    rows: impl IntoIterator<Item = (Vec<String>, &'a BigRational)>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = key_names.to_vec();
    header.extend(["numerator", "denominator", "probability"]);
    w.write_record(&header)?;
    for (mut keys, q) in rows {
        keys.push(q.numer().to_string());
        keys.push(q.denom().to_string());
        keys.push(format!("{:.12e}", q.to_f64().unwrap_or(f64::NAN)));
        w.write_record(&keys)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes a pmf as `value,numerator,denominator,probability`.
pub fn pmf_csv(pmf: &Pmf) -> Result<String> {
    rational_rows_csv(
        &["value"],
        pmf.values()
            .iter()
            .zip(pmf.probabilities())
            .map(|(v, q)| (vec![format_value(*v)], q)),
    )
}

/// Writes the joint law of interior and exterior empty blocks as
/// `s_in,s_ex,numerator,denominator,probability`.
pub fn joint_pmf_csv(pmf: &JointPmf) -> Result<String> {
    let mut cells: Vec<_> = pmf.cells().collect();
    cells.sort_by_key(|(k, _)| **k);
    rational_rows_csv(
        &["s_in", "s_ex"],
        cells
            .into_iter()
            .map(|((a, b), q)| (vec![a.to_string(), b.to_string()], q)),
    )
}

/// Integers print without a fractional part; other values print in
/// shortest round-trip form.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use seblocks_core::nulldist::{empty_block_pmf, interior_exterior_empty_pmf};
    use seblocks_core::partition::BlockFrequencies;
    use seblocks_core::testing::empty_block_test;

    #[test]
    fn pmf_rows() {
        let csv = pmf_csv(&empty_block_pmf(8, 6).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "value,numerator,denominator,probability");
        assert_eq!(lines.len(), 1 + 7);
        assert!(lines[6].starts_with("5,"), "{}", lines[6]);
    }

    #[test]
    fn joint_rows_sorted() {
        let csv = joint_pmf_csv(&interior_exterior_empty_pmf(4, 3).unwrap()).unwrap();
        let first = csv.lines().nth(1).unwrap();
        assert!(first.starts_with("0,0,"), "{first}");
    }

    #[test]
    fn test_report_formats() {
        let f = BlockFrequencies::new(vec![4, 4, 0, 0, 0, 0, 0]).unwrap();
        let r = empty_block_test(&f).unwrap();
        let rep = TestReport::new("EB", &r, f.counts());
        let json: serde_json::Value =
            serde_json::from_str(&rep.render(OutputFormat::Json).unwrap()).unwrap();
        assert_eq!(json["statistic"], 5.0);
        assert_eq!(json["method"], "exact");
        assert_eq!(json["m"], 8);
        assert!(json["gamma"].is_null());
        let csv = rep.render(OutputFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        let table = rep.render(OutputFormat::Table).unwrap();
        assert!(table.contains("p_upper"));
        assert!(!table.contains("alpha"));
    }
}
