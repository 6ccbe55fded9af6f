//! Block partitions built from coordinate-projection cuts.
//!
//! A [`PartitionPlan`] is a schedule of `n` cuts fixed from `(p, n)` alone.
//! [`PartitionPlan::fit`] binds it to a reference sample: at cut `k` every
//! reference point not yet excluded is projected onto the cut's component,
//! the minimum (or maximum) becomes threshold `t_k`, and that point is
//! excluded. Block `k` is everything with projection `<= t_k` (`>= t_k` for
//! maximum cuts) that no earlier cut captured; whatever is left after `n`
//! cuts is block `n + 1`.
//!
//! Block indices in this module are 0-based: index `k` is block `B_{k+1}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{invalid, Error, Result};
use crate::sample::Sample;

/// Which extreme of the remaining projected values realizes a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Cut at the minimum; the block is the half-space below it.
    Min,
    /// Cut at the maximum; the block is the half-space above it.
    Max,
}

impl Direction {
    fn flipped(self) -> Self {
        match self {
            Direction::Min => Direction::Max,
            Direction::Max => Direction::Min,
        }
    }
}

/// One cutting function: a coordinate projection plus a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CutRule {
    /// 0-based coordinate the cut projects onto.
    pub component: usize,
    /// Minimum or maximum cut.
    pub direction: Direction,
}

impl CutRule {
    /// Convenience constructor.
    pub const fn new(component: usize, direction: Direction) -> Self {
        Self {
            component,
            direction,
        }
    }
}

/// How a plan's schedule was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanLabel {
    /// Components cycle with a fixed direction.
    StairStep,
    /// Components cycle and min/max alternate so blocks peel inward.
    Spiral,
    /// Univariate, blocks in ascending order.
    UnivariateAsc,
    /// Univariate, blocks in descending order.
    UnivariateDesc,
    /// A caller-supplied schedule.
    Custom,
}

impl PlanLabel {
    /// Stable lowercase name used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            PlanLabel::StairStep => "stairstep",
            PlanLabel::Spiral => "spiral",
            PlanLabel::UnivariateAsc => "univariate_asc",
            PlanLabel::UnivariateDesc => "univariate_desc",
            PlanLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for PlanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A data-independent schedule of `n` cuts in dimension `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionPlan {
    dim: usize,
    cuts: Vec<CutRule>,
    label: PlanLabel,
}

fn check_sizes(dim: usize, n: usize) -> Result<()> {
    if dim == 0 {
        return Err(invalid("dimension p must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("reference sample size n must be at least 1"));
    }
    Ok(())
}

impl PartitionPlan {
    /// Univariate plan: ascending blocks `(-inf, Y_(1)], (Y_(1), Y_(2)], ...`
    /// when `ascending`, the mirror image otherwise.
    pub fn univariate(n: usize, ascending: bool) -> Result<Self> {
        check_sizes(1, n)?;
        let (direction, label) = if ascending {
            (Direction::Min, PlanLabel::UnivariateAsc)
        } else {
            (Direction::Max, PlanLabel::UnivariateDesc)
        };
        Ok(Self {
            dim: 1,
            cuts: vec![CutRule::new(0, direction); n],
            label,
        })
    }

    /// Stair-step plan: components `0, 1, ..., p-1, 0, 1, ...`, all with the
    /// same direction. With `boustrophedon` every other sweep runs backwards
    /// (`0..p`, then `p-1..=0`, ...).
    pub fn stair_step(
        dim: usize,
        n: usize,
        direction: Direction,
        boustrophedon: bool,
    ) -> Result<Self> {
        check_sizes(dim, n)?;
        let cuts = (0..n)
            .map(|i| {
                let (sweep, pos) = (i / dim, i % dim);
                let component = if boustrophedon && sweep % 2 == 1 {
                    dim - 1 - pos
                } else {
                    pos
                };
                CutRule::new(component, direction)
            })
            .collect();
        Ok(Self {
            dim,
            cuts,
            label: PlanLabel::StairStep,
        })
    }

    /// Spiral plan. Unpaired: components cycle as in the stair-step plan and
    /// each component's direction alternates min, max, min, ... every time it
    /// recurs. Paired: each component is cut at its minimum and then at its
    /// maximum before moving to the next component.
    pub fn spiral(dim: usize, n: usize, paired: bool) -> Result<Self> {
        check_sizes(dim, n)?;
        let cuts = if paired {
            (0..n)
                .map(|i| {
                    let direction = if i % 2 == 0 {
                        Direction::Min
                    } else {
                        Direction::Max
                    };
                    CutRule::new((i / 2) % dim, direction)
                })
                .collect()
        } else {
            let mut next = vec![Direction::Min; dim];
            (0..n)
                .map(|i| {
                    let component = i % dim;
                    let direction = next[component];
                    next[component] = direction.flipped();
                    CutRule::new(component, direction)
                })
                .collect()
        };
        Ok(Self {
            dim,
            cuts,
            label: PlanLabel::Spiral,
        })
    }

    /// A caller-supplied schedule.
    pub fn custom(dim: usize, cuts: Vec<CutRule>) -> Result<Self> {
        check_sizes(dim, cuts.len())?;
        if let Some((i, c)) = cuts.iter().enumerate().find(|(_, c)| c.component >= dim) {
            return Err(invalid(format!(
                "cut {i} projects onto component {} but the dimension is {dim}",
                c.component
            )));
        }
        Ok(Self {
            dim,
            cuts,
            label: PlanLabel::Custom,
        })
    }

    /// Dimension p.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of cuts, which equals the reference sample size n.
    pub fn n(&self) -> usize {
        self.cuts.len()
    }

    /// The cut schedule.
    pub fn cuts(&self) -> &[CutRule] {
        &self.cuts
    }

    /// How the schedule was generated.
    pub fn label(&self) -> PlanLabel {
        self.label
    }

    /// Fits the plan to a reference sample; ties at a cut are an error.
    pub fn fit(&self, y: &Sample) -> Result<FittedPartition> {
        self.fit_with(y, TiePolicy::Error)
    }

    /// Fits the plan to a reference sample with an explicit tie policy.
    pub fn fit_with(&self, y: &Sample, policy: TiePolicy) -> Result<FittedPartition> {
        if y.dim() != self.dim {
            return Err(invalid(format!(
                "reference sample has dimension {} but the plan expects {}",
                y.dim(),
                self.dim
            )));
        }
        if y.len() != self.n() {
            return Err(invalid(format!(
                "reference sample has {} points but the plan has {} cuts",
                y.len(),
                self.n()
            )));
        }
        match policy {
            TiePolicy::Error => self.fit_exact(y),
            TiePolicy::Perturb { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut current = self.fit_exact(y);
                let mut scale = 1.0;
                for _ in 0..MAX_PERTURBATIONS {
                    match current {
                        Err(Error::Tie { .. }) => {
                            let jittered = y.map_coords(|_, v| jitter(v, scale, &mut rng))?;
                            current = self.fit_exact(&jittered);
                            scale *= 2.0;
                        }
                        other => return other,
                    }
                }
                current
            }
        }
    }

    fn fit_exact(&self, y: &Sample) -> Result<FittedPartition> {
        let n = self.n();
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut thresholds = Vec::with_capacity(n);
        let mut cut_points = Vec::with_capacity(n);
        for (step, cut) in self.cuts.iter().enumerate() {
            let c = cut.component;
            let mut best = 0usize;
            let mut tied: Option<usize> = None;
            for slot in 1..remaining.len() {
                let v = y.point(remaining[slot])[c];
                let b = y.point(remaining[best])[c];
                let better = match cut.direction {
                    Direction::Min => v < b,
                    Direction::Max => v > b,
                };
                if better {
                    best = slot;
                    tied = None;
                } else if v == b {
                    tied = Some(slot);
                }
            }
            let idx = remaining[best];
            let value = y.point(idx)[c];
            if let Some(slot) = tied {
                let other = remaining[slot];
                return Err(Error::Tie {
                    step,
                    component: c,
                    first: idx.min(other),
                    second: idx.max(other),
                    value,
                });
            }
            thresholds.push(value);
            cut_points.push(idx);
            remaining.swap_remove(best);
        }
        Ok(FittedPartition {
            plan: self.clone(),
            thresholds,
            cut_points,
        })
    }
}

const MAX_PERTURBATIONS: usize = 32;

fn jitter(v: f64, scale: f64, rng: &mut ChaCha8Rng) -> f64 {
    // uniform in [-1, 1)
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 52) as f64) - 1.0;
    let magnitude = if v == 0.0 {
        f64::MIN_POSITIVE
    } else {
        v.abs() * f64::EPSILON
    };
    v + u * magnitude * scale
}

/// What to do when two reference points share the extreme value at a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Fail with [`Error::Tie`].
    #[default]
    Error,
    /// Perturb every reference coordinate by a seeded relative amount on the
    /// order of one unit in the last place and refit, doubling the magnitude
    /// until the ties disappear.
    Perturb {
        /// Seed for the perturbation stream.
        seed: u64,
    },
}

/// A plan bound to a reference sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPartition {
    plan: PartitionPlan,
    thresholds: Vec<f64>,
    cut_points: Vec<usize>,
}

impl FittedPartition {
    /// The plan that was fitted.
    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    /// Realized cut values `t_1, ..., t_n`.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// 0-based index of the reference point that realized each cut.
    pub fn cut_points(&self) -> &[usize] {
        &self.cut_points
    }

    /// Number of blocks, `n + 1`.
    pub fn n_blocks(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// 0-based block containing `x`. A point on a threshold belongs to the
    /// block that cut closes.
    pub fn assign_block(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.plan.dim {
            return Err(invalid(format!(
                "point has dimension {} but the partition has dimension {}",
                x.len(),
                self.plan.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("point has a non-finite coordinate"));
        }
        Ok(self.locate(x).0)
    }

    /// Block index plus whether `x` sits exactly on the closing threshold.
    fn locate(&self, x: &[f64]) -> (usize, bool) {
        for (k, (cut, &t)) in self.plan.cuts.iter().zip(&self.thresholds).enumerate() {
            let v = x[cut.component];
            let inside = match cut.direction {
                Direction::Min => v <= t,
                Direction::Max => v >= t,
            };
            if inside {
                return (k, v == t);
            }
        }
        (self.thresholds.len(), false)
    }

    /// Counts the points of `x` in each block.
    pub fn block_frequencies(&self, x: &Sample) -> Result<BlockFrequencies> {
        if x.dim() != self.plan.dim {
            return Err(invalid(format!(
                "sample has dimension {} but the partition has dimension {}",
                x.dim(),
                self.plan.dim
            )));
        }
        let mut counts = vec![0u64; self.n_blocks()];
        let mut threshold_ties = 0;
        for p in x.iter() {
            let (k, on_edge) = self.locate(p);
            counts[k] += 1;
            threshold_ties += usize::from(on_edge);
        }
        Ok(BlockFrequencies {
            counts,
            threshold_ties,
        })
    }
}

/// The vector `(R_1, ..., R_{n+1})` of comparison-sample counts per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockFrequencies {
    counts: Vec<u64>,
    threshold_ties: usize,
}

impl BlockFrequencies {
    /// Wraps a count vector; needs at least two blocks.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(invalid(
                "block frequencies need at least two blocks (n >= 1)",
            ));
        }
        Ok(Self {
            counts,
            threshold_ties: 0,
        })
    }

    /// The counts, `counts[i] = R_{i+1}`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total comparison-sample size m.
    pub fn m(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Reference sample size n.
    pub fn n(&self) -> u64 {
        self.counts.len() as u64 - 1
    }

    /// Comparison points that sat exactly on a threshold. Non-zero values
    /// mean the continuity assumption was violated between the samples.
    pub fn threshold_ties(&self) -> usize {
        self.threshold_ties
    }
}
