use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::SenseAnnotatedDataset;

/// Train/test objects of one fold, per annotated sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: [Vec<String>; 2],
    pub test: [Vec<String>; 2],
}

impl Fold {
    pub fn train_union(&self) -> Vec<String> {
        self.train.iter().flatten().cloned().collect()
    }
}

/// Mixed-sense cross validation: each sense's objects are shuffled and cut
/// into `folds` near-equal parts; fold `i` tests on part `i` of both senses
/// and trains on the remaining parts of both.
pub fn crossval_folds(dataset: &SenseAnnotatedDataset, folds: usize, seed: u64) -> Result<Vec<Fold>> {
    if folds < 2 {
        return Err(Error::InvalidArgument("need at least 2 folds".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: Vec<Vec<Vec<String>>> = Vec::with_capacity(2);
    for set in dataset.sets() {
        if set.len() < folds {
            return Err(Error::InvalidArgument(format!(
                "a sense of `{}` has {} objects, fewer than {folds} folds",
                dataset.verb,
                set.len()
            )));
        }
        let mut shuffled = set.to_vec();
        shuffled.shuffle(&mut rng);
        let n = shuffled.len();
        parts.push(
            (0..folds)
                .map(|i| shuffled[i * n / folds..(i + 1) * n / folds].to_vec())
                .collect(),
        );
    }
    Ok((0..folds)
        .map(|i| {
            let split = |s: usize| -> (Vec<String>, Vec<String>) {
                let test = parts[s][i].clone();
                let train = (0..folds)
                    .filter(|&j| j != i)
                    .flat_map(|j| parts[s][j].iter().cloned())
                    .collect();
                (train, test)
            };
            let (train0, test0) = split(0);
            let (train1, test1) = split(1);
            Fold {
                train: [train0, train1],
                test: [test0, test1],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn dataset(a: usize, b: usize) -> SenseAnnotatedDataset {
        SenseAnnotatedDataset {
            verb: "v".into(),
            sense_1: (0..a).map(|i| format!("a{i}")).collect(),
            sense_2: (0..b).map(|i| format!("b{i}")).collect(),
        }
    }

    #[test]
    fn eight_and_eight() {
        let folds = crossval_folds(&dataset(8, 8), 4, 1).unwrap();
        assert_eq!(folds.len(), 4);
        for f in &folds {
            assert_eq!(f.train_union().len(), 12);
            assert_eq!(f.test[0].len() + f.test[1].len(), 4);
        }
    }

    #[test]
    fn tests_partition_each_sense() {
        let ds = dataset(13, 9);
        let folds = crossval_folds(&ds, 4, 5).unwrap();
        for s in 0..2 {
            let mut seen = BTreeSet::new();
            for f in &folds {
                for o in &f.test[s] {
                    assert!(seen.insert(o.clone()), "{o} tested twice");
                    assert!(!f.train[s].contains(o));
                }
                assert_eq!(f.train[s].len() + f.test[s].len(), ds.sets()[s].len());
            }
            assert_eq!(seen.len(), ds.sets()[s].len());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = dataset(10, 10);
        assert_eq!(crossval_folds(&ds, 4, 3).unwrap(), crossval_folds(&ds, 4, 3).unwrap());
        assert_ne!(crossval_folds(&ds, 4, 3).unwrap(), crossval_folds(&ds, 4, 4).unwrap());
    }

    #[test]
    fn too_small() {
        assert!(crossval_folds(&dataset(3, 8), 4, 0).is_err());
    }
}
