use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_space::SemanticSpace;
use crate::error::{Error, Result};
use crate::experiment::{noun_vector, training_set, verb_regression};
use crate::holistic::HolisticPhraseSpace;
use crate::linalg::cosine_vec;
use crate::regression::{apply_verb, RegressionConfig, VerbMatrix};
use crate::stats::{derive_seed, paired_significance};

use super::metrics::{accuracy, mean, mrr, rank_from_scores};
use super::{config_line, crossval_folds, Fold, SenseAnnotatedDataset};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupervisedSettings {
    pub folds: usize,
    pub seed: u64,
    pub permutations: usize,
}

impl Default for SupervisedSettings {
    fn default() -> Self {
        SupervisedSettings {
            folds: 4,
            seed: 0,
            permutations: crate::stats::DEFAULT_PERMUTATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub mrr: f64,
    pub avg_cosine: f64,
    pub count: usize,
}

impl Metrics {
    fn from_outcomes(ranks: &[usize], cosines: &[f64]) -> Result<Self> {
        Ok(Metrics {
            accuracy: accuracy(ranks)?,
            mrr: mrr(ranks)?,
            avg_cosine: mean(cosines),
            count: ranks.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub ambiguous: Metrics,
    pub disambiguated: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    #[serde(flatten)]
    pub metrics: Contrast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbReport {
    pub verb: String,
    #[serde(flatten)]
    pub metrics: Contrast,
    pub folds: Vec<FoldReport>,
    /// Paired test on this verb's per-phrase cosines; absent below 6 phrases.
    pub p_value: Option<f64>,
}

/// Outcome for one test phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseOutcome {
    pub verb: String,
    pub object: String,
    /// Annotated sense, 1 or 2.
    pub sense: usize,
    pub fold: usize,
    pub ambiguous_rank: usize,
    pub disambiguated_rank: usize,
    pub ambiguous_cosine: f64,
    pub disambiguated_cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedReport {
    pub config_hash: Option<String>,
    pub settings: SupervisedSettings,
    /// Size of the candidate pool every holistic vector is ranked against.
    pub candidates: usize,
    pub verbs: Vec<VerbReport>,
    pub overall: Contrast,
    /// Paired permutation test, disambiguated vs ambiguous per-phrase cosine.
    pub p_value: f64,
    pub phrases: Vec<PhraseOutcome>,
}

impl SupervisedReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-verb accuracy, MRR and average cosine for both models.
    pub fn table_tsv(&self) -> String {
        let mut out = config_line(&self.config_hash);
        out.push_str("verb\tamb_accuracy\tamb_mrr\tamb_avg_cosine\tdis_accuracy\tdis_mrr\tdis_avg_cosine\n");
        let row = |out: &mut String, name: &str, c: &Contrast| {
            let (a, d) = (c.ambiguous, c.disambiguated);
            out.push_str(&format!(
                "{name}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\n",
                a.accuracy, a.mrr, a.avg_cosine, d.accuracy, d.mrr, d.avg_cosine
            ));
        };
        for v in &self.verbs {
            row(&mut out, &v.verb, &v.metrics);
        }
        row(&mut out, "all", &self.overall);
        out
    }
}

/// Matrices trained for one verb in one fold.
struct FoldMatrices {
    ambiguous: VerbMatrix,
    senses: [VerbMatrix; 2],
}

fn train_fold(
    ds: &SenseAnnotatedDataset,
    fold: &Fold,
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
    reg: &RegressionConfig,
) -> Result<FoldMatrices> {
    let cfg = verb_regression(reg, &ds.verb);
    let ambiguous = VerbMatrix::train(
        &ds.verb,
        None,
        &training_set(&ds.verb, &fold.train_union(), words, holistic)?,
        &cfg,
    )?;
    let sense = |s: usize| {
        VerbMatrix::train(
            &ds.verb,
            Some(s + 1),
            &training_set(&ds.verb, &fold.train[s], words, holistic)?,
            &cfg,
        )
    };
    Ok(FoldMatrices {
        ambiguous,
        senses: [sense(0)?, sense(1)?],
    })
}

fn check_inputs(
    datasets: &[SenseAnnotatedDataset],
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
) -> Result<()> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput("sense-annotated dataset"));
    }
    let mut missing = Vec::new();
    for ds in datasets {
        ds.validate()?;
        for o in ds.sets().into_iter().flatten() {
            noun_vector(words, o)?;
            if holistic.get(&ds.verb, o).is_none() {
                missing.push(format!("{} {o}", ds.verb));
            }
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingHolistic(missing))
    }
}

/// Mixed-sense cross-validated comparison of ambiguous and per-sense verb
/// matrices.
///
/// In every fold each verb gets one matrix trained on both training sense
/// sets and one per sense. Every dataset phrase (all verbs) is composed with
/// the fold's matrices to form the candidate pool, and each test phrase's
/// holistic vector is ranked against it. Disambiguated composition uses the
/// annotated sense of the object.
pub fn run_supervised_task(
    datasets: &[SenseAnnotatedDataset],
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
    reg: &RegressionConfig,
    settings: &SupervisedSettings,
) -> Result<SupervisedReport> {
    check_inputs(datasets, words, holistic)?;
    let folds: Vec<Vec<Fold>> = datasets
        .iter()
        .map(|ds| crossval_folds(ds, settings.folds, derive_seed(settings.seed, &ds.verb)))
        .collect::<Result<_>>()?;

    // (verb index, object, annotated sense 0|1) for every dataset phrase
    let pool: Vec<(usize, &String, usize)> = datasets
        .iter()
        .enumerate()
        .flat_map(|(v, ds)| {
            ds.sets()
                .into_iter()
                .enumerate()
                .flat_map(move |(s, set)| set.iter().map(move |o| (v, o, s)))
        })
        .collect();
    let nouns: Vec<DVector<f64>> = pool
        .iter()
        .map(|(_, o, _)| noun_vector(words, o))
        .collect::<Result<_>>()?;
    let targets: Vec<DVector<f64>> = pool
        .iter()
        .map(|&(v, o, _)| holistic.get(&datasets[v].verb, o).expect("checked"))
        .collect();
    let position: BTreeMap<(usize, &str), usize> = pool
        .iter()
        .enumerate()
        .map(|(i, &(v, o, _))| ((v, o.as_str()), i))
        .collect();

    let mut phrases = Vec::new();
    for f in 0..settings.folds {
        let matrices: Vec<FoldMatrices> = datasets
            .par_iter()
            .zip(&folds)
            .map(|(ds, vf)| train_fold(ds, &vf[f], words, holistic, reg))
            .collect::<Result<_>>()?;
        let mut amb = Vec::with_capacity(pool.len());
        let mut dis = Vec::with_capacity(pool.len());
        for (&(v, _, s), x) in pool.iter().zip(&nouns) {
            amb.push(apply_verb(&matrices[v].ambiguous, x)?);
            dis.push(apply_verb(&matrices[v].senses[s], x)?);
        }
        for (v, ds) in datasets.iter().enumerate() {
            for (s, test) in folds[v][f].test.iter().enumerate() {
                for o in test {
                    let i = position[&(v, o.as_str())];
                    let h = &targets[i];
                    let score = |c: &DVector<f64>| cosine_vec(h, c).unwrap_or(0.0);
                    let amb_scores: Vec<f64> = amb.iter().map(score).collect();
                    let dis_scores: Vec<f64> = dis.iter().map(score).collect();
                    phrases.push(PhraseOutcome {
                        verb: ds.verb.clone(),
                        object: o.clone(),
                        sense: s + 1,
                        fold: f,
                        ambiguous_rank: rank_from_scores(&amb_scores, i),
                        disambiguated_rank: rank_from_scores(&dis_scores, i),
                        ambiguous_cosine: amb_scores[i],
                        disambiguated_cosine: dis_scores[i],
                    });
                }
            }
        }
    }

    let contrast = |sel: &[&PhraseOutcome]| -> Result<Contrast> {
        let ranks = |f: fn(&PhraseOutcome) -> usize| sel.iter().map(|p| f(p)).collect::<Vec<_>>();
        let cos = |f: fn(&PhraseOutcome) -> f64| sel.iter().map(|p| f(p)).collect::<Vec<_>>();
        Ok(Contrast {
            ambiguous: Metrics::from_outcomes(&ranks(|p| p.ambiguous_rank), &cos(|p| p.ambiguous_cosine))?,
            disambiguated: Metrics::from_outcomes(&ranks(|p| p.disambiguated_rank), &cos(|p| p.disambiguated_cosine))?,
        })
    };
    let test_of = |sel: &[&PhraseOutcome], seed: u64| -> Result<f64> {
        let d: Vec<f64> = sel.iter().map(|p| p.disambiguated_cosine).collect();
        let a: Vec<f64> = sel.iter().map(|p| p.ambiguous_cosine).collect();
        paired_significance(&d, &a, settings.permutations, seed)
    };

    let mut verbs = Vec::with_capacity(datasets.len());
    for ds in datasets {
        let sel: Vec<&PhraseOutcome> = phrases.iter().filter(|p| p.verb == ds.verb).collect();
        let folds = (0..settings.folds)
            .map(|f| {
                let in_fold: Vec<&PhraseOutcome> = sel.iter().copied().filter(|p| p.fold == f).collect();
                Ok(FoldReport {
                    fold: f,
                    metrics: contrast(&in_fold)?,
                })
            })
            .collect::<Result<_>>()?;
        let p_value = match test_of(&sel, derive_seed(settings.seed, &ds.verb)) {
            Ok(p) => Some(p),
            Err(Error::TooFewPairs { .. }) => None,
            Err(e) => return Err(e),
        };
        verbs.push(VerbReport {
            verb: ds.verb.clone(),
            metrics: contrast(&sel)?,
            folds,
            p_value,
        });
    }
    let all: Vec<&PhraseOutcome> = phrases.iter().collect();
    Ok(SupervisedReport {
        config_hash: None,
        settings: settings.clone(),
        candidates: pool.len(),
        verbs,
        overall: contrast(&all)?,
        p_value: test_of(&all, settings.seed)?,
        phrases,
    })
}
