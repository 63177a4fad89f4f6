use std::collections::BTreeSet;

use proptest::prelude::*;
use verbsense::eval::{accuracy, crossval_folds, mrr, paired_significance, spearman_rho, SenseAnnotatedDataset};

proptest! {
    #[test]
    fn accuracy_at_most_mrr_at_most_one(ranks in prop::collection::vec(1usize..50, 1..40)) {
        let (acc, m) = (accuracy(&ranks).unwrap(), mrr(&ranks).unwrap());
        prop_assert!(acc <= m && m <= 1.0);
    }

    #[test]
    fn spearman_is_symmetric_and_rank_based(
        xs in prop::collection::vec(0i32..6, 3..25),
        ys in prop::collection::vec(-50.0f64..50.0, 25),
    ) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let ys = &ys[..xs.len()];
        let Ok(rho) = spearman_rho(&xs, ys) else { return Ok(()) };
        prop_assert!((rho - spearman_rho(ys, &xs).unwrap()).abs() < 1e-12);
        let squashed: Vec<f64> = ys.iter().map(|y| (y / 10.0).tanh() * 3.0 + 1.0).collect();
        let cubed: Vec<f64> = xs.iter().map(|x| x.powi(3) - 7.0).collect();
        prop_assert!((rho - spearman_rho(&cubed, &squashed).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn folds_partition_each_sense(n1 in 4usize..20, n2 in 4usize..20, folds in 2usize..5, seed in any::<u64>()) {
        let dataset = SenseAnnotatedDataset {
            verb: "v".into(),
            sense_1: (0..n1).map(|i| format!("a{i}")).collect(),
            sense_2: (0..n2).map(|i| format!("b{i}")).collect(),
        };
        let parts = crossval_folds(&dataset, folds, seed).unwrap();
        prop_assert_eq!(&parts, &crossval_folds(&dataset, folds, seed).unwrap());
        for (s, set) in dataset.sets().iter().enumerate() {
            let mut seen = BTreeSet::new();
            for f in &parts {
                for o in &f.test[s] {
                    prop_assert!(seen.insert(o.clone()));
                    prop_assert!(!f.train[s].contains(o));
                }
                prop_assert_eq!(f.test[s].len() + f.train[s].len(), set.len());
            }
            prop_assert_eq!(seen, set.iter().cloned().collect::<BTreeSet<_>>());
        }
    }
}

#[test]
fn identical_lists_are_not_significant() {
    let a = [0.3, 0.1, 0.7, 0.2, 0.9, 0.4];
    assert_eq!(paired_significance(&a, &a, 1000, 0).unwrap(), 1.0);
}

#[test]
fn constant_gain_is_significant() {
    let b: Vec<f64> = (0..20).map(|i| i as f64 * 0.03).collect();
    let a: Vec<f64> = b.iter().map(|x| x + 0.1).collect();
    assert!(paired_significance(&a, &b, 100_000, 1).unwrap() < 0.001);
}

#[test]
fn balanced_differences_are_not_significant() {
    let b = vec![0.0; 8];
    let a = [0.5, -0.5, 0.2, -0.2, 0.1, -0.1, 0.3, -0.3];
    assert!(paired_significance(&a, &b, 1000, 2).unwrap() > 0.5);
}

#[test]
fn spearman_with_ties_by_hand() {
    // ranks of xs: 1, 2.5, 2.5, 4 against 1, 2, 3, 4
    let rho = spearman_rho(&[1.0, 2.0, 2.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap();
    let (rx, ry) = ([1.0, 2.5, 2.5, 4.0], [1.0, 2.0, 3.0, 4.0]);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - 2.5) * (b - 2.5)).sum();
    let vx: f64 = rx.iter().map(|a| (a - 2.5f64).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - 2.5f64).powi(2)).sum();
    assert!((rho - cov / (vx * vy).sqrt()).abs() < 1e-12);
}

#[test]
fn reciprocal_rank_by_hand() {
    assert!((mrr(&[1, 2, 4]).unwrap() - 0.5833333333333334).abs() < 1e-15);
    assert!((accuracy(&[1, 2, 4]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(accuracy(&[2, 3]).unwrap(), 0.0);
}
