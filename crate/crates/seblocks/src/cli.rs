//! Command-line front-end.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use seblocks_core::nulldist::{
    dixon_c2_null, empty_block_pmf, interior_exterior_empty_pmf, linear_rank_null,
    maximal_block_pmf, oracle, precedence_pmf, runs_pmf, NullMethod, NullReference, Pmf,
};
use seblocks_core::partition::{BlockFrequencies, PlanLabel};
use seblocks_core::scores::{make_scores, ScoreFamily};
use seblocks_core::testing::{
    find_cross_sample_duplicate, randomized_decision, univariate_frequencies, Alternative,
    PreparedTest,
};
use seblocks_core::{Error, Sample, DEFAULT_ENUMERATION_CAP};

use crate::catalog::{auto_method, make_plan, parse_plan, TestName};
use crate::config::load_config;
use crate::csvio::{parse_frequencies, read_sample};
use crate::report::{
    format_value, joint_pmf_csv, pmf_csv, rational_rows_csv, render_power, OutputFormat, TestReport,
};
use crate::simulate::{run_power_study, PowerReport};

/// Environment variable overriding the enumeration cap.
pub const ENUM_CAP_VAR: &str = "SEBLOCKS_ENUM_CAP";

/// Exact, distribution-free two-sample tests on statistically equivalent
/// blocks.
#[derive(Debug, Parser)]
#[command(name = "seblocks", version)]
pub struct Cli {
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a test on two CSV samples or on block frequencies.
    Test(TestArgs),
    /// Write an exact null distribution as CSV.
    Dist(DistArgs),
    /// Run a power study described by a configuration file.
    Power(PowerArgs),
}

/// How the null distribution is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Complete enumeration or an exact recursion.
    Exact,
    /// Seeded Monte Carlo draws.
    #[value(alias = "monte_carlo", alias = "mc")]
    MonteCarlo,
    /// Normal approximation (linear rank statistics only).
    Normal,
}

/// Which sample builds the blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleArg {
    /// The `--x` file.
    X,
    /// The `--y` file.
    Y,
}

/// Arguments of `seblocks test`.
#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV file of the X sample.
    #[arg(long, required_unless_present = "freqs")]
    pub x: Option<PathBuf>,
    /// CSV file of the Y sample.
    #[arg(long, required_unless_present = "freqs")]
    pub y: Option<PathBuf>,
    /// Block frequencies instead of raw data, e.g. `4,4,0,0,0,0,0`.
    #[arg(long, conflicts_with_all = ["x", "y", "plan", "partition_sample"])]
    pub freqs: Option<String>,
    /// wilcoxon, vdw, th, mood, klotz, siegel_tukey, linear_rank,
    /// precedence, maximal_block, empty_block, dixon or runs.
    #[arg(long, default_value = "wilcoxon")]
    pub test: String,
    /// spiral, stairstep or univariate (default: univariate for one
    /// column, spiral otherwise).
    #[arg(long)]
    pub plan: Option<String>,
    /// Score family for linear rank tests.
    #[arg(long)]
    pub scores: Option<String>,
    /// Number of leading blocks for precedence and maximal-block tests.
    #[arg(long)]
    pub j: Option<usize>,
    /// lower, upper or two-sided (default depends on the test).
    #[arg(long)]
    pub alternative: Option<String>,
    /// Level of the decision.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Null method (default: exact while enumeration fits under the cap).
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 100_000)]
    pub replicates: u64,
    /// Seed of the Monte Carlo null and of the randomized decision.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exit with status 2 when the test rejects.
    #[arg(long)]
    pub decide: bool,
    /// Decide by `p <= alpha` instead of randomizing at the critical value.
    #[arg(long)]
    pub conservative: bool,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Which sample builds the blocks.
    #[arg(long, value_enum, default_value = "y")]
    pub partition_sample: SampleArg,
}

/// Arguments of `seblocks dist`.
#[derive(Debug, Args)]
pub struct DistArgs {
    /// precedence, empty_block, maximal_block, runs, interior_exterior,
    /// dixon_c2 or linear_rank.
    #[arg(long)]
    pub statistic: String,
    /// Size of the counted sample.
    #[arg(long)]
    pub m: u64,
    /// Size of the partitioning sample.
    #[arg(long)]
    pub n: u64,
    /// Number of leading blocks.
    #[arg(long)]
    pub j: Option<usize>,
    /// Score family for linear_rank (default wilcoxon).
    #[arg(long)]
    pub scores: Option<String>,
    /// Also tabulate the law by brute-force enumeration and fail unless the
    /// two tables are identical.
    #[arg(long)]
    pub oracle: bool,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `seblocks power`.
#[derive(Debug, Args)]
pub struct PowerArgs {
    /// TOML study configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub output: OutputFormat,
    /// Worker threads (default: the file's `threads`, else all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Replace every study's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Text for standard output and the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Text for standard output.
    pub stdout: String,
    /// Exit status.
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

/// The enumeration cap: `SEBLOCKS_ENUM_CAP` if set, else the default.
pub fn enumeration_cap() -> Result<u64> {
    match std::env::var(ENUM_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .with_context(|| format!("{ENUM_CAP_VAR}='{v}' is not a non-negative integer")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_ENUMERATION_CAP),
        Err(e) => Err(anyhow!("{ENUM_CAP_VAR}: {e}")),
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Dist(a) => cmd_dist(a),
        Command::Power(a) => cmd_power(a),
    }
}

fn is_linear_rank_key(s: &str) -> bool {
    let key: String = s
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    matches!(key.as_str(), "linearrank" | "lr")
}

fn resolve_test(test: &str, scores: Option<&str>, j: Option<usize>) -> Result<TestName> {
    let family = scores.map(str::parse::<ScoreFamily>).transpose()?;
    let mut name = if is_linear_rank_key(test) {
        TestName::LinearRank(family.ok_or_else(|| anyhow!("--test linear_rank needs --scores"))?)
    } else {
        test.parse::<TestName>()?
    };
    match (&mut name, family) {
        (TestName::LinearRank(f), Some(g)) => *f = g,
        (_, Some(_)) => bail!("--scores only applies to linear rank tests"),
        _ => {}
    }
    match (&mut name, j) {
        (TestName::Precedence(k) | TestName::MaximalBlock(k), Some(j)) => *k = Some(j),
        (_, Some(_)) => bail!("--j only applies to precedence and maximal-block tests"),
        _ => {}
    }
    Ok(name)
}

fn describe_fit_error(e: Error, file: &Path) -> anyhow::Error {
    match e {
        Error::Tie {
            step,
            component,
            first,
            second,
            value,
        } => anyhow!(
            "{}: rows {} and {} tie at {value} in column {} (cut {}); the blocks are ambiguous",
            file.display(),
            first + 1,
            second + 1,
            component + 1,
            step + 1
        ),
        other => anyhow!("{}: {other}", file.display()),
    }
}

struct RawFrequencies {
    freqs: BlockFrequencies,
    dim: usize,
    plan: PlanLabel,
}

fn raw_frequencies(a: &TestArgs, name: &TestName) -> Result<RawFrequencies> {
    let x_path =
        a.x.as_deref()
            .context("--x is required unless --freqs is given")?;
    let y_path =
        a.y.as_deref()
            .context("--y is required unless --freqs is given")?;
    let x = read_sample(x_path)?;
    let y = read_sample(y_path)?;
    if x.dim() != y.dim() {
        bail!(
            "dimension mismatch: {} has {} columns but {} has {}",
            x_path.display(),
            x.dim(),
            y_path.display(),
            y.dim()
        );
    }
    if let Some((i, k)) = find_cross_sample_duplicate(&x, &y) {
        bail!(
            "tie between samples: row {} of {} equals row {} of {}",
            i + 1,
            x_path.display(),
            k + 1,
            y_path.display()
        );
    }
    let (counted, reference, counted_path, reference_path): (Sample, Sample, &Path, &Path) =
        match a.partition_sample {
            SampleArg::Y => (x, y, x_path, y_path),
            SampleArg::X => (y, x, y_path, x_path),
        };
    if counted.len() < reference.len() {
        eprintln!(
            "warning: the partitioning sample {} ({}) is larger than the counted sample {} ({}); \
             partitioning with the smaller sample usually gives more useful blocks",
            reference_path.display(),
            reference.len(),
            counted_path.display(),
            counted.len()
        );
    }
    let dim = counted.dim();
    if matches!(name, TestName::Runs) {
        if dim != 1 {
            bail!(
                "the runs test needs one column, got {dim}; use empty_block for multivariate data"
            );
        }
        let freqs = univariate_frequencies(&counted, &reference).map_err(|e| anyhow!("{e}"))?;
        return Ok(RawFrequencies {
            freqs,
            dim,
            plan: PlanLabel::UnivariateAsc,
        });
    }
    let label = match &a.plan {
        Some(p) => parse_plan(p)?,
        None if dim == 1 => PlanLabel::UnivariateAsc,
        None => PlanLabel::Spiral,
    };
    let fitted = make_plan(label, dim, reference.len())?
        .fit(&reference)
        .map_err(|e| describe_fit_error(e, reference_path))?;
    let freqs = fitted.block_frequencies(&counted)?;
    if freqs.threshold_ties() > 0 {
        eprintln!(
            "warning: {} point(s) of {} lie exactly on a block threshold",
            freqs.threshold_ties(),
            counted_path.display()
        );
    }
    Ok(RawFrequencies {
        freqs,
        dim,
        plan: label,
    })
}

fn null_method(arg: Option<MethodArg>, replicates: u64, seed: u64) -> Option<NullMethod> {
    arg.map(|m| match m {
        MethodArg::Exact => NullMethod::Exact,
        MethodArg::MonteCarlo => NullMethod::MonteCarlo { replicates, seed },
        MethodArg::Normal => NullMethod::Normal,
    })
}

/// `seblocks test`.
pub fn cmd_test(a: &TestArgs) -> Result<Outcome> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        bail!("--alpha must lie in (0, 1), got {}", a.alpha);
    }
    let cap = enumeration_cap()?;
    let name = resolve_test(&a.test, a.scores.as_deref(), a.j)?;
    let alternative = a
        .alternative
        .as_deref()
        .map(str::parse::<Alternative>)
        .transpose()?;
    let (freqs, context) = match &a.freqs {
        Some(f) => (BlockFrequencies::new(parse_frequencies(f)?)?, None),
        None => {
            let raw = raw_frequencies(a, &name)?;
            (raw.freqs, Some((raw.dim, raw.plan)))
        }
    };
    let (m, n) = (freqs.m() as usize, freqs.n() as usize);
    let kind = name.kind(m, n)?;
    let alternative = alternative.unwrap_or_else(|| kind.default_alternative());
    let method = null_method(a.method, a.replicates, a.seed)
        .unwrap_or_else(|| auto_method(&name, m, n, cap, a.replicates, a.seed));
    let test = PreparedTest::new(kind, m as u64, n as u64, alternative, method, cap)?;
    let mut result = test.evaluate(&freqs)?;
    if let Some((dim, plan)) = context {
        result = result.with_context(dim, plan, freqs.threshold_ties());
    }
    let report = TestReport::new(&name.label(), &result, freqs.counts());
    let (report, reject) = match &result.null {
        NullReference::Exact(_) if !a.conservative => {
            let d = randomized_decision(&result, a.alpha, a.seed)?;
            (report.with_randomized(a.alpha, d, a.seed), d.reject)
        }
        _ => {
            let reject = result.p_value() <= a.alpha;
            (report.with_decision(a.alpha, reject, None, None), reject)
        }
    };
    Ok(Outcome {
        stdout: report.render(a.output)?,
        code: if a.decide && reject { 2 } else { 0 },
    })
}

fn tally_csv<K: Ord + Clone>(
    tally: &oracle::Tally<K>,
    key: impl Fn(&K) -> String,
) -> Result<String> {
    let probs: Vec<(Vec<String>, BigRational)> = tally
        .counts
        .keys()
        .map(|k| (vec![key(k)], tally.probability(k)))
        .collect();
    rational_rows_csv(&["value"], probs.iter().map(|(k, q)| (k.clone(), q)))
}

fn exact_pmf(null: NullReference) -> Result<Pmf> {
    match null {
        NullReference::Exact(p) => Ok((*p).clone()),
        other => bail!("expected an exact null, got {}", other.method_name()),
    }
}

/// `seblocks dist`.
pub fn cmd_dist(a: &DistArgs) -> Result<Outcome> {
    let cap = enumeration_cap()?;
    let (m, n) = (a.m, a.n);
    let key: String = a
        .statistic
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    let takes_j = matches!(key.as_str(), "precedence" | "prec" | "maximalblock" | "mb");
    if a.j.is_some() && !takes_j {
        bail!("--j only applies to precedence and maximal_block");
    }
    if a.scores.is_some() && !matches!(key.as_str(), "linearrank" | "lr") {
        bail!("--scores only applies to linear_rank");
    }
    let int_key = |v: &i64| v.to_string();
    let (table, oracle_table) = match key.as_str() {
        "precedence" | "prec" => {
            let j = a.j.unwrap_or((n as usize).div_ceil(2).max(1));
            let t = pmf_csv(&precedence_pmf(m, n, j)?)?;
            let o = a.oracle.then(|| tally_csv(&oracle::precedence(m, n, j, cap)?, int_key));
            (t, o)
        }
        "emptyblock" | "eb" => {
            let t = pmf_csv(&empty_block_pmf(m, n)?)?;
            (t, a.oracle.then(|| tally_csv(&oracle::empty_blocks(m, n, cap)?, int_key)))
        }
        "maximalblock" | "mb" => {
            let j = a.j.unwrap_or(n as usize + 1);
            let t = pmf_csv(&maximal_block_pmf(m, n, j)?)?;
            (t, a.oracle.then(|| tally_csv(&oracle::maximal_block(m, n, j, cap)?, int_key)))
        }
        "runs" => {
            let t = pmf_csv(&runs_pmf(m, n)?)?;
            (t, a.oracle.then(|| tally_csv(&oracle::runs(m, n, cap)?, int_key)))
        }
        "interiorexterior" | "interiorexteriorempty" => {
            let t = joint_pmf_csv(&interior_exterior_empty_pmf(m, n)?)?;
            let o = a.oracle.then(|| {
                let tally = oracle::interior_exterior(m, n, cap)?;
                let rows: Vec<(Vec<String>, BigRational)> = tally
                    .counts
                    .keys()
                    .map(|k| (vec![k.0.to_string(), k.1.to_string()], tally.probability(k)))
                    .collect();
                rational_rows_csv(&["s_in", "s_ex"], rows.iter().map(|(k, q)| (k.clone(), q)))
            });
            (t, o)
        }
        "dixonc2" | "dixon" => {
            let t = pmf_csv(&exact_pmf(dixon_c2_null(m, n, NullMethod::Exact, cap)?)?)?;
            let o = a.oracle.then(|| {
                let denom = (m as f64) * (m as f64) * ((n + 1) as f64) * ((n + 1) as f64);
                tally_csv(&oracle::dixon_scaled(m, n, cap)?, |d| format_value(*d as f64 / denom))
            });
            (t, o)
        }
        "linearrank" | "lr" | "ranksum" => {
            let family = a.scores.as_deref().unwrap_or("wilcoxon").parse::<ScoreFamily>()?;
            let scores = make_scores(family, m as usize, n as usize)?;
            let t = pmf_csv(&exact_pmf(linear_rank_null(m, n, scores.as_slice(), NullMethod::Exact, cap)?)?)?;
            let o = match (a.oracle, family) {
                (false, _) => None,
                (true, ScoreFamily::Wilcoxon) => Some(tally_csv(&oracle::rank_sum(m, n, cap)?, int_key)),
                (true, f) => bail!("no independent oracle for {f} scores; their exact law is itself an enumeration"),
            };
            (t, o)
        }
        _ => bail!(
            "unknown statistic '{}' (expected precedence, empty_block, maximal_block, runs, interior_exterior, \
             dixon_c2 or linear_rank)",
            a.statistic
        ),
    };
    if let Some(o) = oracle_table {
        let o = o?;
        if o != table {
            bail!(
                "closed form and enumeration disagree for {} (m = {m}, n = {n})",
                a.statistic
            );
        }
        eprintln!(
            "oracle: enumeration matches ({} rows)",
            table.lines().count() - 1
        );
    }
    write_or_return(table, a.out.as_deref())
}

fn write_or_return(text: String, out: Option<&Path>) -> Result<Outcome> {
    match out {
        Some(path) => {
            std::fs::write(path, &text)
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

/// `seblocks power`.
pub fn cmd_power(a: &PowerArgs) -> Result<Outcome> {
    let mut plan = load_config(&a.config)?;
    if a.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let threads = a.threads.or(plan.threads);
    let mut combined = PowerReport {
        estimates: Vec::new(),
        tie_retries: 0,
    };
    for study in &mut plan.studies {
        if let Some(seed) = a.seed {
            study.seed = seed;
        }
        let r = run_power_study(study, threads)
            .with_context(|| format!("{} c = {}", study.spec.scenario, study.spec.c))?;
        combined.estimates.extend(r.estimates);
        combined.tie_retries += r.tie_retries;
    }
    write_or_return(render_power(&combined, a.output)?, a.out.as_deref())
}
