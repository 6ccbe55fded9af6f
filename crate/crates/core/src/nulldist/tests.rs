use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::*;
use crate::DEFAULT_ENUMERATION_CAP as CAP;

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[test]
fn precedence_two_point_symmetry() {
    let p = precedence_pmf(1, 1, 1).unwrap();
    assert_eq!(p.values(), &[0.0, 1.0]);
    assert_eq!(p.probabilities(), &[q(1, 2), q(1, 2)]);
}

#[test]
fn precedence_matches_enumeration() {
    let p = precedence_pmf(5, 5, 2).unwrap();
    assert!(p.matches_tally(&oracle::precedence(5, 5, 2, CAP).unwrap()));
    assert_eq!(p.total(), BigRational::one());
    assert!(precedence_pmf(5, 5, 0).is_err());
    assert!(precedence_pmf(5, 5, 6).is_err());
}

#[test]
fn empty_block_examples() {
    let p = empty_block_pmf(5, 4).unwrap();
    assert!(p.matches_tally(&oracle::empty_blocks(5, 4, CAP).unwrap()));
    let one = empty_block_pmf(1, 1).unwrap();
    assert_eq!(one.values(), &[1.0]);
    assert_eq!(one.prob(1), BigRational::one());
    let small = empty_block_pmf(3, 5).unwrap();
    assert_eq!(small.values()[0], 3.0);
}

#[test]
fn joint_block_examples() {
    assert_eq!(joint_block_pmf(4, 3, &[4, 0, 0, 0]).unwrap(), q(1, 35));
    assert_eq!(
        joint_block_pmf(4, 3, &[3, 0, 0, 0]).unwrap(),
        BigRational::zero()
    );
    assert_eq!(joint_block_pmf(4, 3, &[2]).unwrap(), q(6, 35));
    assert_eq!(
        joint_block_pmf(4, 3, &[2]).unwrap(),
        oracle::joint_block(4, 3, &[2], CAP).unwrap()
    );
    assert!(joint_block_pmf(4, 3, &[3, 2]).is_err());
    assert!(joint_block_pmf(4, 3, &[]).is_err());
}

#[test]
fn joint_block_marginal_is_first_block_precedence() {
    let (m, n) = (6, 4);
    let prec = precedence_pmf(m, n, 1).unwrap();
    for r1 in 0..=m {
        let marginal = (0..=m - r1).fold(BigRational::zero(), |acc, r2| {
            acc + joint_block_pmf(m, n, &[r1, r2]).unwrap()
        });
        assert_eq!(marginal, prec.prob(r1 as i64), "r1={r1}");
    }
}

#[test]
fn maximal_block_examples() {
    let p = maximal_block_pmf(6, 4, 5).unwrap();
    assert!(p.matches_tally(&oracle::maximal_block(6, 4, 5, CAP).unwrap()));
    let tiny = maximal_block_pmf(2, 1, 2).unwrap();
    assert_eq!(tiny.values(), &[1.0, 2.0]);
    assert_eq!(tiny.probabilities(), &[q(1, 3), q(2, 3)]);
    for (m, n) in [(3u64, 2u64), (7, 5), (10, 2)] {
        for j in 1..=(n as usize + 1) {
            assert_eq!(
                maximal_block_pmf(m, n, j).unwrap().total(),
                BigRational::one()
            );
        }
    }
    assert!(maximal_block_pmf(3, 2, 4).is_err());
}

#[test]
fn maximal_block_all_in_one_block() {
    for (m, n) in [(4u64, 3u64), (9, 2), (1, 5)] {
        let p = maximal_block_pmf(m, n, n as usize + 1).unwrap();
        let expected = BigRational::new(
            BigInt::from(n + 1),
            BigInt::from(binomial((m + n) as i64, n as i64)),
        );
        assert_eq!(p.prob(m as i64), expected);
    }
}

#[test]
fn runs_examples() {
    let p = runs_pmf(5, 4).unwrap();
    assert_eq!(p.prob(2), q(2, 126));
    assert_eq!(p.values().first(), Some(&2.0));
    assert_eq!(p.values().last(), Some(&9.0));
    assert!(p.matches_tally(&oracle::runs(5, 4, CAP).unwrap()));
    assert_eq!(runs_pmf(1, 1).unwrap().prob(2), BigRational::one());
    for m in 1..=10 {
        for n in 1..=10 {
            assert_eq!(runs_pmf(m, n).unwrap().total(), BigRational::one());
            assert_eq!(runs_pmf(m, n).unwrap(), {
                let mut s = runs_pmf(n, m).unwrap();
                s.m = m;
                s.n = n;
                s
            });
        }
    }
}

#[test]
fn interior_exterior_marginal_is_empty_block() {
    for m in 1..=8 {
        for n in 2..=8 {
            let joint = interior_exterior_empty_pmf(m, n).unwrap();
            assert_eq!(joint.total(), BigRational::one());
            let empty = empty_block_pmf(m, n).unwrap();
            for s0 in 0..=n as i64 {
                let marginal =
                    (0..=2).fold(BigRational::zero(), |acc, ex| acc + joint.prob(s0 - ex, ex));
                assert_eq!(marginal, empty.prob(s0), "m={m} n={n} s0={s0}");
            }
        }
    }
    assert!(interior_exterior_empty_pmf(3, 1).is_err());
}

#[test]
fn rank_sum_matches_enumeration() {
    for (m, n) in [(1u64, 1u64), (3, 4), (8, 6), (5, 5)] {
        let p = rank_sum_pmf(m, n).unwrap();
        assert!(
            p.matches_tally(&oracle::rank_sum(m, n, CAP).unwrap()),
            "m={m} n={n}"
        );
    }
}

#[test]
fn rank_sum_large_sizes_normalize() {
    let p = rank_sum_pmf(60, 40).unwrap();
    assert_eq!(p.total(), BigRational::one());
    assert_eq!(p.len(), 60 * 40 + 1);
    assert!((p.mean() - 60.0 * 101.0 / 2.0).abs() < 1e-9);
}

#[test]
fn wilcoxon_normal_moments() {
    let (m, n) = (8u64, 6u64);
    let scores: Vec<f64> = (1..=14).map(f64::from).collect();
    let mom = linear_rank_moments(m, n, &scores);
    assert!((mom.mean - 60.0).abs() < 1e-12);
    assert!((mom.variance - 60.0).abs() < 1e-12);
}

#[test]
fn constant_scores_are_degenerate() {
    let scores = vec![2.5; 7];
    let mom = linear_rank_moments(4, 3, &scores);
    assert_eq!(mom.mean, 10.0);
    assert_eq!(mom.variance, 0.0);
    let NullReference::Exact(p) = linear_rank_null(4, 3, &scores, NullMethod::Exact, CAP).unwrap()
    else {
        panic!("expected exact null");
    };
    assert_eq!(p.values(), &[10.0]);
}

#[test]
fn wilcoxon_exact_tail_for_table_example() {
    let scores: Vec<f64> = (1..=14).map(f64::from).collect();
    let NullReference::Exact(p) = linear_rank_null(8, 6, &scores, NullMethod::Exact, CAP).unwrap()
    else {
        panic!("expected exact null");
    };
    // 12 of the 3003 arrangements have W <= 40
    let tally = oracle::rank_sum(8, 6, CAP).unwrap();
    let below: u64 = tally.counts.range(..=40).map(|(_, c)| c).sum();
    assert_eq!(below, 12);
    assert_eq!(p.cdf(40.0), q(12, 3003));
}

#[test]
fn enumerated_linear_rank_agrees_with_rank_sum_recursion() {
    // shift the Wilcoxon scores so the recursion shortcut is not taken
    let scores: Vec<f64> = (1..=10).map(|i| f64::from(i) + 0.5).collect();
    let NullReference::Exact(p) = linear_rank_null(4, 6, &scores, NullMethod::Exact, CAP).unwrap()
    else {
        panic!("expected exact null");
    };
    let w = rank_sum_pmf(4, 6).unwrap();
    assert_eq!(p.len(), w.len());
    for (i, v) in p.values().iter().enumerate() {
        assert!((v - 2.0 - w.values()[i]).abs() < 1e-12);
        assert_eq!(p.probabilities()[i], w.probabilities()[i]);
    }
}

#[test]
fn linear_rank_exact_respects_cap() {
    let scores = vec![0.25; 40];
    assert!(matches!(
        linear_rank_null(20, 20, &scores, NullMethod::Exact, CAP),
        Err(crate::Error::Capacity { .. })
    ));
    assert!(linear_rank_null(3, 3, &scores[..5], NullMethod::Normal, CAP).is_err());
}

#[test]
fn monte_carlo_linear_rank_is_seeded() {
    let scores: Vec<f64> = (1..=10).map(f64::from).collect();
    let method = NullMethod::MonteCarlo {
        replicates: 2000,
        seed: 9,
    };
    let a = linear_rank_null(5, 5, &scores, method, CAP).unwrap();
    let b = linear_rank_null(5, 5, &scores, method, CAP).unwrap();
    assert_eq!(a, b);
    let NullReference::Empirical(e) = a else {
        panic!()
    };
    assert_eq!(e.draws.len(), 2000);
    let mean: f64 = e.draws.iter().sum::<f64>() / 2000.0;
    assert!((mean - 27.5).abs() < 0.5);
}

#[test]
fn dixon_three_vectors() {
    let NullReference::Exact(p) = dixon_c2_null(2, 1, NullMethod::Exact, CAP).unwrap() else {
        panic!("expected exact null");
    };
    // (1,1) gives 0 and (2,0), (0,2) both give 1/2
    assert_eq!(p.values(), &[0.0, 0.5]);
    assert_eq!(p.probabilities(), &[q(1, 3), q(2, 3)]);
    assert_eq!(dixon_c2(&[1, 1]), 0.0);
    assert_eq!(dixon_c2(&[2, 0]), 0.5);
}

#[test]
fn dixon_extremes() {
    let n = 6u64;
    let m = 8u64;
    let mut all_first = vec![0u64; n as usize + 1];
    all_first[0] = m;
    let k = (n + 1) as f64;
    let expected = (1.0 / k - 1.0).powi(2) + n as f64 / (k * k);
    assert!((dixon_c2(&all_first) - expected).abs() < 1e-15);
    let balanced = vec![2u64; 7];
    assert_eq!(dixon_c2(&balanced), 0.0);
}

#[test]
fn dixon_exact_and_monte_carlo_agree() {
    let NullReference::Exact(exact) = dixon_c2_null(5, 5, NullMethod::Exact, CAP).unwrap() else {
        panic!()
    };
    let method = NullMethod::MonteCarlo {
        replicates: 100_000,
        seed: 11,
    };
    let NullReference::Empirical(mc) = dixon_c2_null(5, 5, method, CAP).unwrap() else {
        panic!()
    };
    for &t in exact.values().iter().step_by(3) {
        let p = exact.sf_f64(t);
        let se = (p * (1.0 - p) / 100_000.0).sqrt().max(1e-6);
        assert!((mc.p_upper(t) - p).abs() <= 3.0 * se + 2e-5, "t={t}");
    }
}

#[test]
fn enumeration_probability_matches_joint_mass() {
    let e = FrequencyEnumeration::new(4, 3, CAP).unwrap();
    assert_eq!(e.len(), 35);
    for v in e.vectors() {
        assert_eq!(joint_block_pmf(4, 3, v).unwrap(), q(1, 35));
    }
}

#[test]
fn pmf_tail_helpers() {
    let p = empty_block_pmf(8, 6).unwrap();
    assert_eq!(p.cdf(6.0), BigRational::one());
    assert_eq!(p.sf(0.0), BigRational::one());
    let total: f64 = p.probabilities_f64().iter().sum();
    assert!((total - 1.0).abs() < 1e-15);
    assert_eq!(p.cdf(2.0) + p.sf(3.0), BigRational::one());
}

#[test]
fn empirical_null_as_pmf() {
    let method = NullMethod::MonteCarlo {
        replicates: 4000,
        seed: 3,
    };
    let NullReference::Empirical(e) = dixon_c2_null(3, 2, method, CAP).unwrap() else {
        panic!()
    };
    let pmf = e.to_pmf(Statistic::DixonC2, 3, 2);
    assert_eq!(pmf.total(), BigRational::one());
    let NullReference::Exact(exact) = dixon_c2_null(3, 2, NullMethod::Exact, CAP).unwrap() else {
        panic!()
    };
    assert_eq!(pmf.len(), exact.len());
}
