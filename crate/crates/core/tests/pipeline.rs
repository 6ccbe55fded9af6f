use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use seblocks_core::nulldist::{enumerate::for_each_frequency_vector, precedence_pmf, NullMethod};
use seblocks_core::partition::{BlockFrequencies, PartitionPlan};
use seblocks_core::scores::{make_scores, ScoreFamily};
use seblocks_core::testing::{empty_block_test, linear_rank_test, Alternative, TestKind};
use seblocks_core::{Sample, DEFAULT_ENUMERATION_CAP};

fn table_y() -> Sample {
    Sample::new(vec![
        vec![1.28, 0.87],
        vec![-0.79, -0.96],
        vec![0.70, 0.65],
        vec![-1.23, 1.58],
        vec![-0.24, -0.68],
        vec![-0.40, 1.36],
    ])
    .unwrap()
}

fn table_x_shifted() -> Sample {
    Sample::new(vec![
        vec![-0.25, -1.79],
        vec![-2.21, -0.26],
        vec![0.11, -1.66],
        vec![-1.45, -1.42],
        vec![0.64, -1.66],
        vec![0.81, -1.88],
        vec![-3.18, -2.01],
        vec![-2.18, -0.61],
    ])
    .unwrap()
}

#[test]
fn shifted_sample_lands_in_the_first_blocks() {
    let fitted = PartitionPlan::spiral(2, 6, false)
        .unwrap()
        .fit(&table_y())
        .unwrap();
    let freqs = fitted.block_frequencies(&table_x_shifted()).unwrap();
    assert_eq!(freqs.counts(), &[4, 4, 0, 0, 0, 0, 0]);
    let rs = make_scores(ScoreFamily::Wilcoxon, 8, 6).unwrap();
    let r = linear_rank_test(
        &freqs,
        &rs,
        Alternative::TwoSided,
        NullMethod::Exact,
        DEFAULT_ENUMERATION_CAP,
    )
    .unwrap();
    assert_eq!(r.statistic, 40.0);
}

#[test]
fn empty_block_p_value_is_an_enumerated_tail() {
    let freqs = BlockFrequencies::new(vec![4, 4, 0, 0, 0, 0, 0]).unwrap();
    let r = empty_block_test(&freqs).unwrap();
    let observed = TestKind::EmptyBlock.statistic(freqs.counts());
    let (mut hits, mut total) = (0u64, 0u64);
    for_each_frequency_vector(8, 6, DEFAULT_ENUMERATION_CAP, |v| {
        total += 1;
        hits += u64::from(TestKind::EmptyBlock.statistic(v) >= observed);
    })
    .unwrap();
    assert_eq!(total, 3003);
    assert_eq!(hits, 154);
    assert!((r.p_upper - 154.0 / 3003.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn frequencies_partition_the_sample(
        pts in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..30),
        split in 1usize..29,
    ) {
        let split = split.min(pts.len() - 1);
        let y = Sample::new(pts[..split].to_vec()).unwrap();
        let x = Sample::new(pts[split..].to_vec()).unwrap();
        for plan in [PartitionPlan::spiral(3, y.len(), false), PartitionPlan::stair_step(3, y.len(), seblocks_core::partition::Direction::Min, false)] {
            let Ok(fitted) = plan.unwrap().fit(&y) else { continue };
            let freqs = fitted.block_frequencies(&x).unwrap();
            prop_assert_eq!(freqs.counts().len(), y.len() + 1);
            prop_assert_eq!(freqs.m() as usize, x.len());
        }
    }

    #[test]
    fn precedence_law_sums_to_one(m in 1u64..40, n in 1u64..40, j in 1usize..40) {
        let j = j.min(n as usize);
        let pmf = precedence_pmf(m, n, j).unwrap();
        let total = (0..=m as i64).fold(BigRational::zero(), |acc, t| acc + pmf.prob(t));
        prop_assert_eq!(total, BigRational::one());
    }
}
