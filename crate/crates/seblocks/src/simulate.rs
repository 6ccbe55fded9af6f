//! Scenario generators and a deterministic, parallel Monte Carlo harness.
//!
//! Replicate `r` of a study draws everything from the ChaCha8 stream
//! `(seed, r)`, so results do not depend on how replicates are spread over
//! worker threads.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use seblocks_core::nulldist::{check_capacity, FrequencyEnumeration};
use seblocks_core::partition::{FittedPartition, PlanLabel};
use seblocks_core::{Error, Result, Sample, DEFAULT_ENUMERATION_CAP};

use crate::catalog::{auto_method, calibrate, make_plan, plan_short, CalibratedTest, TestName};

/// The generating model of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "String")]
pub enum Scenario {
    /// X and Y both `Normal(0, Sigma)`.
    Null,
    /// One of the six alternatives, numbered 1 to 6.
    Alternative(u8),
}

impl From<Scenario> for String {
    fn from(s: Scenario) -> String {
        s.to_string()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Null => f.write_str("null"),
            Scenario::Alternative(k) => write!(f, "alt{k}"),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        if matches!(key.as_str(), "null" | "nullcase" | "h0" | "0") {
            return Ok(Scenario::Null);
        }
        let digits = key
            .strip_prefix("alternative")
            .or_else(|| key.strip_prefix("alt"))
            .unwrap_or(&key);
        match digits.parse::<u8>() {
            Ok(k @ 1..=6) => Ok(Scenario::Alternative(k)),
            _ => Err(Error::InvalidArgument(format!(
                "unknown scenario '{s}' (expected null or 1 to 6)"
            ))),
        }
    }
}

/// Elliptical family of a mixture component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Multivariate normal.
    Normal,
    /// Multivariate Cauchy: `z / |w|` with `z ~ Normal(0, Sigma)` and `w`
    /// an independent standard normal.
    Cauchy,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(Family::Normal),
            "cauchy" => Ok(Family::Cauchy),
            _ => Err(Error::InvalidArgument(format!(
                "unknown distribution '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Component {
    Elliptical {
        family: Family,
        location: Vec<f64>,
        factor: DMatrix<f64>,
    },
    Cube {
        lo: f64,
        hi: f64,
    },
}

impl Component {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Component::Elliptical {
                family,
                location,
                factor,
            } => {
                let p = out.len();
                let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                let scale = match family {
                    Family::Normal => 1.0,
                    Family::Cauchy => 1.0 / rng.sample::<f64, _>(StandardNormal).abs(),
                };
                for (i, o) in out.iter_mut().enumerate() {
                    let lz: f64 = (0..=i).map(|k| factor[(i, k)] * z[k]).sum();
                    *o = location[i] + scale * lz;
                }
            }
            Component::Cube { lo, hi } => {
                for o in out.iter_mut() {
                    *o = lo + (hi - lo) * rng.random::<f64>();
                }
            }
        }
    }
}

/// A finite mixture of components; one uniform picks the component of each
/// observation whenever there is more than one.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    dim: usize,
    parts: Vec<(f64, Component)>,
}

impl Mixture {
    fn single(dim: usize, c: Component) -> Self {
        Self {
            dim,
            parts: vec![(1.0, c)],
        }
    }

    /// `family(0, factor factor')` in `dim` dimensions.
    pub fn elliptical(family: Family, factor: DMatrix<f64>) -> Self {
        let dim = factor.nrows();
        Self::single(
            dim,
            Component::Elliptical {
                family,
                location: vec![0.0; dim],
                factor,
            },
        )
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One observation.
    pub fn draw_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let component = if self.parts.len() == 1 {
            &self.parts[0].1
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = &self.parts[self.parts.len() - 1].1;
            for (w, c) in &self.parts {
                acc += w;
                if u < acc {
                    pick = c;
                    break;
                }
            }
            pick
        };
        component.draw(rng, out);
    }

    /// `count` observations.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Sample {
        let mut coords = vec![0.0; count * self.dim];
        for chunk in coords.chunks_exact_mut(self.dim) {
            self.draw_point(rng, chunk);
        }
        Sample::from_flat(self.dim, coords).expect("generated coordinates are finite")
    }
}

/// `Sigma_ij = rho^|i-j|`.
pub fn toeplitz_sigma(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Lower Cholesky factor, or an error when `sigma` is not positive definite.
pub fn cholesky_factor(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !sigma.is_square() || sigma.nrows() == 0 {
        return Err(Error::InvalidArgument(
            "sigma must be a non-empty square matrix".into(),
        ));
    }
    if (sigma - sigma.transpose()).amax() > 1e-12 {
        return Err(Error::InvalidArgument("sigma must be symmetric".into()));
    }
    nalgebra::Cholesky::new(sigma.clone())
        .map(|c| c.l())
        .ok_or_else(|| Error::InvalidArgument("sigma must be positive definite".into()))
}

/// A scenario with its parameter, dimension and sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    /// Generating model.
    pub scenario: Scenario,
    /// Scenario parameter (shift, scale factor or mixture weight).
    pub c: f64,
    /// Dimension.
    pub p: usize,
    /// X sample size.
    pub m: usize,
    /// Y sample size.
    pub n: usize,
    sigma: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl ScenarioSpec {
    /// Spec with `Sigma_ij = 0.35^|i-j|`.
    pub fn new(scenario: Scenario, c: f64, p: usize, m: usize, n: usize) -> Result<Self> {
        Self::with_sigma(scenario, c, m, n, toeplitz_sigma(p, 0.35))
    }

    /// Spec with a caller-supplied `Sigma`.
    pub fn with_sigma(
        scenario: Scenario,
        c: f64,
        m: usize,
        n: usize,
        sigma: DMatrix<f64>,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("m and n must be at least 1".into()));
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument("c must be finite".into()));
        }
        match scenario {
            Scenario::Alternative(3 | 4) if c <= 0.0 => {
                return Err(Error::InvalidArgument(format!(
                    "{scenario} needs c > 0, got {c}"
                )));
            }
            Scenario::Alternative(5 | 6) if !(0.0..=1.0).contains(&c) => {
                return Err(Error::InvalidArgument(format!(
                    "{scenario} needs 0 <= c <= 1, got {c}"
                )));
            }
            _ => {}
        }
        let factor = cholesky_factor(&sigma)?;
        Ok(Self {
            scenario,
            c,
            p: sigma.nrows(),
            m,
            n,
            sigma,
            factor,
        })
    }

    /// The scale matrix.
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    fn centred(&self, family: Family, scale: f64) -> Component {
        Component::Elliptical {
            family,
            location: vec![0.0; self.p],
            factor: &self.factor * scale.sqrt(),
        }
    }

    /// `(0, c, c, ..., c)`.
    fn shifted(&self, family: Family) -> Component {
        let location = (0..self.p)
            .map(|i| if i == 0 { 0.0 } else { self.c })
            .collect();
        Component::Elliptical {
            family,
            location,
            factor: self.factor.clone(),
        }
    }

    /// Laws of X and Y.
    pub fn laws(&self) -> (Mixture, Mixture) {
        use Family::{Cauchy, Normal};
        let p = self.p;
        let c = self.c;
        let mix = |parts: Vec<(f64, Component)>| Mixture { dim: p, parts };
        let cube = Component::Cube { lo: 0.45, hi: 0.55 };
        match self.scenario {
            Scenario::Null => {
                let law = Mixture::single(p, self.centred(Normal, 1.0));
                (law.clone(), law)
            }
            Scenario::Alternative(k) => {
                let base = if matches!(k, 1 | 5) { Cauchy } else { Normal };
                let x = Mixture::single(p, self.centred(base, 1.0));
                let y = match k {
                    1 | 2 => mix(vec![
                        (0.9, self.centred(base, 1.0)),
                        (0.1, self.shifted(base)),
                    ]),
                    3 => Mixture::single(p, self.centred(Normal, c)),
                    4 => mix(vec![
                        (0.9, self.centred(Normal, 1.0)),
                        (0.1, self.centred(Cauchy, c)),
                    ]),
                    _ => mix(vec![(1.0 - c, self.centred(base, 1.0)), (c, cube)]),
                };
                (x, y)
            }
        }
    }

    /// Draws `(X, Y)`.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> (Sample, Sample) {
        let (xl, yl) = self.laws();
        let x = xl.sample(rng, self.m);
        let y = yl.sample(rng, self.n);
        (x, y)
    }
}

/// Draws `(X, Y)` from a fresh generator seeded with `seed`.
pub fn generate_scenario(spec: &ScenarioSpec, seed: u64) -> (Sample, Sample) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spec.generate(&mut rng)
}

/// The generator of replicate `r`.
pub fn replicate_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// One test of a study: a statistic on a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StudyTest {
    /// The test.
    pub test: TestName,
    /// The plan.
    pub plan: PlanLabel,
}

impl StudyTest {
    /// `RS (Sp)` style label.
    pub fn label(&self) -> String {
        format!("{} ({})", self.test.label(), plan_short(self.plan))
    }
}

/// Everything a power study needs.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    /// Generating model and sizes.
    pub spec: ScenarioSpec,
    /// Tests to run on every replicate.
    pub tests: Vec<StudyTest>,
    /// Level.
    pub alpha: f64,
    /// Number of replicates `N`.
    pub replicates: u64,
    /// Base seed.
    pub seed: u64,
    /// Flip a coin for which sample builds the partition.
    pub randomize_roles: bool,
    /// Apply one random column permutation to both samples.
    pub permute_columns: bool,
    /// Draws for Monte Carlo nulls.
    pub null_draws: u64,
    /// Enumeration cap for exact nulls.
    pub cap: u64,
}

impl StudyConfig {
    /// Defaults: roles randomized, columns permuted, 100 000 null draws.
    pub fn new(
        spec: ScenarioSpec,
        tests: Vec<StudyTest>,
        alpha: f64,
        replicates: u64,
        seed: u64,
    ) -> Self {
        Self {
            spec,
            tests,
            alpha,
            replicates,
            seed,
            randomize_roles: true,
            permute_columns: true,
            null_draws: 100_000,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// Estimated rejection rate of one test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEstimate {
    /// Test and plan label, e.g. `RS (Sp)`.
    pub test: String,
    /// Plan.
    pub plan: String,
    /// Scenario.
    pub scenario: Scenario,
    /// Scenario parameter.
    pub c: f64,
    /// Dimension.
    pub p: usize,
    /// X sample size.
    pub m: usize,
    /// Y sample size.
    pub n: usize,
    /// Level.
    pub alpha: f64,
    /// Number of replicates.
    pub replicates: u64,
    /// Number of rejections.
    pub rejections: u64,
    /// `rejections / replicates`.
    pub rejection_rate: f64,
    /// `sqrt(rate (1 - rate) / replicates)`.
    pub std_error: f64,
    /// Base seed.
    pub seed: u64,
    /// Null method of the statistic (for the `X`-partitioned orientation
    /// when roles are randomized and sizes differ, the method may differ).
    pub method: String,
    /// Whether decisions were randomized to exact size.
    pub randomized: bool,
}

/// Estimates for every test plus the number of regenerated replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    /// One estimate per configured test.
    pub estimates: Vec<PowerEstimate>,
    /// Replicates regenerated because of tied reference coordinates.
    pub tie_retries: u64,
}

const MAX_TIE_RETRIES: u32 = 100;

struct Oriented {
    /// Prepared for (counted = m, reference = n).
    straight: Vec<CalibratedTest>,
    /// Prepared for (counted = n, reference = m), when the sizes differ.
    swapped: Option<Vec<CalibratedTest>>,
}

fn calibrate_all(
    cfg: &StudyConfig,
    counted: usize,
    reference: usize,
) -> Result<Vec<CalibratedTest>> {
    cfg.tests
        .iter()
        .map(|t| {
            let method = auto_method(
                &t.test,
                counted,
                reference,
                cfg.cap,
                cfg.null_draws,
                cfg.seed,
            );
            calibrate(
                &t.test, counted, reference, None, method, cfg.alpha, cfg.cap,
            )
        })
        .collect()
}

fn validate(cfg: &StudyConfig) -> Result<()> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidArgument(
            "replicates must be at least 1".into(),
        ));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    if cfg.tests.is_empty() {
        return Err(Error::InvalidArgument(
            "a study needs at least one test".into(),
        ));
    }
    Ok(())
}

/// Runs the study on a pool of `threads` workers (`None`: rayon's default).
pub fn run_power_study(cfg: &StudyConfig, threads: Option<usize>) -> Result<PowerReport> {
    validate(cfg)?;
    let spec = &cfg.spec;
    let oriented = Oriented {
        straight: calibrate_all(cfg, spec.m, spec.n)?,
        swapped: if spec.m != spec.n && cfg.randomize_roles {
            Some(calibrate_all(cfg, spec.n, spec.m)?)
        } else {
            None
        },
    };
    let mut plans: Vec<PlanLabel> = Vec::new();
    for t in &cfg.tests {
        if !plans.contains(&t.plan) {
            plans.push(t.plan);
        }
    }
    let plan_index: Vec<usize> = cfg
        .tests
        .iter()
        .map(|t| plans.iter().position(|p| *p == t.plan).unwrap_or(0))
        .collect();
    let straight_plans = plans
        .iter()
        .map(|&l| make_plan(l, spec.p, spec.n))
        .collect::<Result<Vec<_>>>()?;
    let swapped_plans = plans
        .iter()
        .map(|&l| make_plan(l, spec.p, spec.m))
        .collect::<Result<Vec<_>>>()?;

    let run = |r: u64| -> Result<(Vec<bool>, u64)> {
        let mut rng = replicate_rng(cfg.seed, r);
        let swap = cfg.randomize_roles && rng.random::<bool>();
        let order: Vec<usize> = {
            let mut o: Vec<usize> = (0..spec.p).collect();
            if cfg.permute_columns {
                o.shuffle(&mut rng);
            }
            o
        };
        let mut retries = 0u64;
        let freqs = loop {
            let (x, y) = spec.generate(&mut rng);
            let (x, y) = if cfg.permute_columns {
                (x.permute_components(&order)?, y.permute_components(&order)?)
            } else {
                (x, y)
            };
            let (counted, reference, schedule) = if swap {
                (y, x, &swapped_plans)
            } else {
                (x, y, &straight_plans)
            };
            let fitted: Result<Vec<FittedPartition>> =
                schedule.iter().map(|p| p.fit(&reference)).collect();
            match fitted {
                Ok(fits) => {
                    break fits
                        .iter()
                        .map(|f| f.block_frequencies(&counted).map(|b| b.counts().to_vec()))
                        .collect::<Result<Vec<_>>>()?;
                }
                Err(Error::Tie { .. }) if retries < MAX_TIE_RETRIES as u64 => retries += 1,
                Err(e) => return Err(e),
            }
        };
        let tests = match (&oriented.swapped, swap) {
            (Some(s), true) => s,
            _ => &oriented.straight,
        };
        let decisions = tests
            .iter()
            .zip(&plan_index)
            .map(|(t, &pi)| {
                let u: f64 = rng.random();
                let stat = t.test.statistic(&freqs[pi]);
                t.rule.reject(stat, u)
            })
            .collect();
        Ok((decisions, retries))
    };

    let work = || -> Result<Vec<(Vec<bool>, u64)>> {
        (0..cfg.replicates).into_par_iter().map(run).collect()
    };
    let outcomes = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut rejections = vec![0u64; cfg.tests.len()];
    let mut tie_retries = 0;
    for (decisions, retries) in &outcomes {
        tie_retries += retries;
        for (count, &d) in rejections.iter_mut().zip(decisions) {
            *count += d as u64;
        }
    }
    let estimates = cfg
        .tests
        .iter()
        .zip(&rejections)
        .zip(&oriented.straight)
        .map(|((t, &k), cal)| {
            let rate = k as f64 / cfg.replicates as f64;
            PowerEstimate {
                test: t.label(),
                plan: t.plan.as_str().to_string(),
                scenario: spec.scenario,
                c: spec.c,
                p: spec.p,
                m: spec.m,
                n: spec.n,
                alpha: cfg.alpha,
                replicates: cfg.replicates,
                rejections: k,
                rejection_rate: rate,
                std_error: (rate * (1.0 - rate) / cfg.replicates as f64).sqrt(),
                seed: cfg.seed,
                method: cal.test.null().method_name().to_string(),
                randomized: cal.rule.is_randomized(),
            }
        })
        .collect();
    Ok(PowerReport {
        estimates,
        tie_retries,
    })
}

/// Monte Carlo estimates of block coverages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageDiagnostic {
    /// `Q_1, ..., Q_{n+1}` estimates.
    pub coverages: Vec<f64>,
    /// Binomial standard errors.
    pub std_errors: Vec<f64>,
    /// Number of draws.
    pub draws: u64,
}

/// Estimates each block's probability content under `law` from `draws`
/// fresh points.
pub fn coverage_diagnostic(
    fp: &FittedPartition,
    law: &Mixture,
    draws: u64,
    seed: u64,
) -> Result<CoverageDiagnostic> {
    if draws == 0 {
        return Err(Error::InvalidArgument("draws must be at least 1".into()));
    }
    if law.dim() != fp.plan().dim() {
        return Err(Error::InvalidArgument(
            "generator and partition dimensions differ".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; fp.n_blocks()];
    let mut point = vec![0.0; law.dim()];
    for _ in 0..draws {
        law.draw_point(&mut rng, &mut point);
        counts[fp.assign_block(&point)?] += 1;
    }
    let b = draws as f64;
    let coverages: Vec<f64> = counts.iter().map(|&k| k as f64 / b).collect();
    let std_errors = coverages
        .iter()
        .map(|q| (q * (1.0 - q) / b).sqrt())
        .collect();
    Ok(CoverageDiagnostic {
        coverages,
        std_errors,
        draws,
    })
}

/// Tabulated frequency vectors from simulated null pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    /// Every possible vector, in enumeration order.
    pub vectors: Vec<Vec<u64>>,
    /// Occurrences of each vector.
    pub counts: Vec<u64>,
    /// `1 / C(m+n, n)`.
    pub expected: f64,
    /// Largest `|p_hat - expected| / se` over the vectors.
    pub max_abs_z: f64,
    /// Number of replicates.
    pub replicates: u64,
}

/// Simulates `replicates` pairs from one `family` law with `Sigma_ij =
/// 0.35^|i-j|` and tabulates the block frequencies.
#[allow(clippy::too_many_arguments)]
pub fn frequency_uniformity_check(
    m: usize,
    n: usize,
    p: usize,
    plan: PlanLabel,
    family: Family,
    replicates: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<UniformityReport> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(
            "replicates must be at least 1".into(),
        ));
    }
    check_capacity(m as u64, n as u64, 100_000)?;
    let enumeration = FrequencyEnumeration::new(m as u64, n as u64, 100_000)?;
    let index: HashMap<&[u64], usize> = enumeration
        .vectors()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let law = Mixture::elliptical(family, cholesky_factor(&toeplitz_sigma(p, 0.35))?);
    let schedule = make_plan(plan, p, n)?;
    let run = |r: u64| -> Result<usize> {
        let mut rng = replicate_rng(seed, r);
        for _ in 0..=MAX_TIE_RETRIES {
            let x = law.sample(&mut rng, m);
            let y = law.sample(&mut rng, n);
            match schedule.fit(&y) {
                Ok(fp) => {
                    let f = fp.block_frequencies(&x)?;
                    return Ok(index[f.counts()]);
                }
                Err(Error::Tie { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidArgument(
            "persistent ties in generated data".into(),
        ))
    };
    let work = || -> Result<Vec<usize>> { (0..replicates).into_par_iter().map(run).collect() };
    let hits = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let mut counts = vec![0u64; enumeration.len()];
    for h in hits {
        counts[h] += 1;
    }
    let expected = enumeration.probability();
    let se = (expected * (1.0 - expected) / replicates as f64).sqrt();
    let max_abs_z = counts
        .iter()
        .map(|&k| ((k as f64 / replicates as f64 - expected) / se).abs())
        .fold(0.0, f64::max);
    Ok(UniformityReport {
        vectors: enumeration.vectors().to_vec(),
        counts,
        expected,
        max_abs_z,
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use seblocks_core::scores::ScoreFamily;

    #[test]
    fn scenario_names() {
        assert_eq!("null".parse::<Scenario>().unwrap(), Scenario::Null);
        assert_eq!("3".parse::<Scenario>().unwrap(), Scenario::Alternative(3));
        assert_eq!(
            "Alt 5".parse::<Scenario>().unwrap(),
            Scenario::Alternative(5)
        );
        assert!("7".parse::<Scenario>().is_err());
        assert_eq!(Scenario::Alternative(2).to_string(), "alt2");
    }

    #[test]
    fn sigma_is_positive_definite() {
        let s = toeplitz_sigma(3, 0.35);
        assert_eq!(s[(0, 2)], 0.35 * 0.35);
        let l = cholesky_factor(&s).unwrap();
        assert!((&l * l.transpose() - &s).amax() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(ScenarioSpec::with_sigma(Scenario::Null, 0.0, 5, 5, bad).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(ScenarioSpec::new(Scenario::Alternative(3), 0.0, 3, 5, 5).is_err());
        assert!(ScenarioSpec::new(Scenario::Alternative(5), 1.5, 3, 5, 5).is_err());
        assert!(ScenarioSpec::new(Scenario::Alternative(1), -2.0, 3, 5, 5).is_ok());
    }

    #[test]
    fn generation_is_seeded() {
        let spec = ScenarioSpec::new(Scenario::Alternative(1), 10.0, 3, 20, 15).unwrap();
        let (x1, y1) = generate_scenario(&spec, 4);
        let (x2, y2) = generate_scenario(&spec, 4);
        assert_eq!((x1.len(), y1.len(), x1.dim()), (20, 15, 3));
        assert_eq!(x1, x2);
        assert_eq!(y1, y2);
    }

    #[test]
    fn normal_moments() {
        let spec = ScenarioSpec::new(Scenario::Null, 0.0, 3, 20_000, 1).unwrap();
        let (x, _) = generate_scenario(&spec, 11);
        let cov =
            |a: usize, b: usize| x.iter().map(|pt| pt[a] * pt[b]).sum::<f64>() / x.len() as f64;
        assert!((cov(0, 0) - 1.0).abs() < 0.05);
        assert!((cov(0, 1) - 0.35).abs() < 0.05);
        assert!((cov(0, 2) - 0.1225).abs() < 0.05);
    }

    #[test]
    fn uniform_component_stays_in_cube() {
        let spec = ScenarioSpec::new(Scenario::Alternative(5), 1.0, 3, 1, 500).unwrap();
        let (_, y) = generate_scenario(&spec, 2);
        assert!(y.as_flat().iter().all(|&v| (0.45..0.55).contains(&v)));
    }

    #[test]
    fn scale_one_is_the_null() {
        let spec = ScenarioSpec::new(Scenario::Alternative(3), 1.0, 2, 5, 5).unwrap();
        let (xl, yl) = spec.laws();
        assert_eq!(xl, yl);
    }

    #[test]
    fn shift_is_applied_to_all_but_the_first_component() {
        let spec = ScenarioSpec::new(Scenario::Alternative(2), 50.0, 3, 1, 4000).unwrap();
        let (_, y) = generate_scenario(&spec, 8);
        let far = y
            .iter()
            .filter(|pt| pt[1] > 25.0 && pt[2] > 25.0 && pt[0].abs() < 10.0)
            .count();
        let share = far as f64 / 4000.0;
        assert!((share - 0.1).abs() < 0.02, "{share}");
    }

    #[test]
    fn study_rejects_bad_configs() {
        let spec = ScenarioSpec::new(Scenario::Null, 0.0, 2, 10, 10).unwrap();
        let tests = vec![StudyTest {
            test: TestName::EmptyBlock,
            plan: PlanLabel::Spiral,
        }];
        assert!(run_power_study(
            &StudyConfig::new(spec.clone(), tests.clone(), 0.05, 0, 1),
            Some(1)
        )
        .is_err());
        assert!(run_power_study(
            &StudyConfig::new(spec.clone(), vec![], 0.05, 10, 1),
            Some(1)
        )
        .is_err());
        assert!(run_power_study(&StudyConfig::new(spec, tests, 1.5, 10, 1), Some(1)).is_err());
    }

    #[test]
    fn study_is_thread_count_independent() {
        let spec = ScenarioSpec::new(Scenario::Alternative(3), 2.0, 3, 12, 9).unwrap();
        let tests = vec![
            StudyTest {
                test: TestName::LinearRank(ScoreFamily::Wilcoxon),
                plan: PlanLabel::Spiral,
            },
            StudyTest {
                test: TestName::MaximalBlock(None),
                plan: PlanLabel::StairStep,
            },
        ];
        let cfg = StudyConfig::new(spec, tests, 0.05, 300, 5);
        let a = run_power_study(&cfg, Some(1)).unwrap();
        let b = run_power_study(&cfg, Some(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.estimates[0].test, "RS (Sp)");
    }

    #[test]
    fn coverages_sum_to_one() {
        let law = Mixture::elliptical(
            Family::Normal,
            cholesky_factor(&toeplitz_sigma(2, 0.35)).unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = law.sample(&mut rng, 4);
        let fp = make_plan(PlanLabel::Spiral, 2, 4).unwrap().fit(&y).unwrap();
        let d = coverage_diagnostic(&fp, &law, 5000, 2).unwrap();
        assert_eq!(d.coverages.len(), 5);
        assert!((d.coverages.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniformity_with_two_vectors() {
        let r = frequency_uniformity_check(
            1,
            1,
            2,
            PlanLabel::Spiral,
            Family::Normal,
            4000,
            3,
            Some(2),
        )
        .unwrap();
        assert_eq!(r.vectors, vec![vec![1, 0], vec![0, 1]]);
        assert!(r.max_abs_z < 4.0);
    }
}
