//! In-memory drivers for the full pipeline: spaces, verb matrices, sense
//! inventories and both evaluation tasks.
//!
//! Per-verb work runs on the ambient rayon pool. Each unit is itself
//! single-threaded and results are keyed by verb, so outputs do not depend
//! on the number of threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::composition::{CompositionModel, ModelKind, Resources, VerbSenses};
use crate::config::{Paths, PipelineConfig};
use crate::corpus::{Corpus, StopList, WordKey};
use crate::corpus_space::{build_space, BuiltSpace, SemanticSpace, Vocabulary};
use crate::error::{Error, Result};
use crate::eval::{
    run_similarity_task, run_supervised_task, PhraseSimEntry, SenseAnnotatedDataset, SimilarityReport,
    SimilaritySettings, SupervisedReport, SupervisedSettings,
};
use crate::holistic::{
    build_holistic_vectors, collect_phrases, read_relations, HolisticPhraseSpace, RelationOccurrence,
};
use crate::regression::{RegressionConfig, TrainingSet, VerbMatrix};
use crate::sense::{assign_object, build_sense_inventory, ClusterConfig, SenseInventory};
use crate::stats::derive_seed;
use crate::synth::SyntheticData;

/// Raw pipeline inputs.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub corpus: Corpus,
    pub stoplist: StopList,
    pub relations: Vec<RelationOccurrence>,
}

fn required<'a>(path: &'a Option<std::path::PathBuf>, key: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("`paths.{key}` is not set")))
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::from(e).in_file(path))
}

impl Inputs {
    /// Reads corpus, stop list and relations named in `paths`.
    pub fn load(paths: &Paths) -> Result<Self> {
        let corpus_path = required(&paths.corpus, "corpus")?;
        let stop_path = required(&paths.stoplist, "stoplist")?;
        let relations_path = required(&paths.relations, "relations")?;
        Ok(Inputs {
            corpus: Corpus::read(open(corpus_path)?).map_err(|e| e.in_file(corpus_path))?,
            stoplist: StopList::read(open(stop_path)?).map_err(|e| e.in_file(stop_path))?,
            relations: read_relations(open(relations_path)?).map_err(|e| e.in_file(relations_path))?,
        })
    }
}

impl From<&SyntheticData> for Inputs {
    fn from(data: &SyntheticData) -> Self {
        Inputs {
            corpus: data.corpus.clone(),
            stoplist: data.stoplist.clone(),
            relations: data.relations.clone(),
        }
    }
}

/// The word space and the holistic phrase space, however obtained.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub words: SemanticSpace,
    pub holistic: HolisticPhraseSpace,
}

pub fn build_word_space(inputs: &Inputs, cfg: &PipelineConfig) -> Result<BuiltSpace> {
    build_space(&inputs.corpus, &inputs.stoplist, &cfg.space)
}

/// Holistic vectors over the basis of the word space vocabulary.
pub fn build_holistic_space(
    inputs: &Inputs,
    vocabulary: &Vocabulary,
    cfg: &PipelineConfig,
) -> Result<HolisticPhraseSpace> {
    let inventory = collect_phrases(&inputs.relations, &inputs.corpus, cfg.holistic.min_phrase_count)?;
    build_holistic_vectors(
        &inputs.corpus,
        &inventory,
        vocabulary,
        &cfg.holistic,
        cfg.space.pmi_log_base,
        cfg.space.clip_negative_lmi,
    )
}

pub fn build_spaces(inputs: &Inputs, cfg: &PipelineConfig) -> Result<Spaces> {
    let built = build_word_space(inputs, cfg)?;
    let holistic = build_holistic_space(inputs, &built.vocabulary, cfg)?;
    Ok(Spaces {
        words: built.space,
        holistic,
    })
}

/// Objects of the similarity dataset; their phrases never reach training
/// or sense induction.
pub fn heldout_objects(dataset: &[PhraseSimEntry]) -> BTreeSet<String> {
    dataset
        .iter()
        .flat_map(|e| [e.first.object.clone(), e.second.object.clone()])
        .collect()
}

/// Verbs of the holistic space, sorted.
pub fn holistic_verbs(holistic: &HolisticPhraseSpace) -> Vec<String> {
    let verbs: BTreeSet<&str> = holistic.vectors.keys().iter().map(|k| k.verb.as_str()).collect();
    verbs.into_iter().map(String::from).collect()
}

pub(crate) fn noun_vector(words: &SemanticSpace, object: &str) -> Result<DVector<f64>> {
    let key = WordKey::noun(object);
    words.get(&key).ok_or_else(|| Error::MissingResource {
        kind: "word vector",
        name: key.to_string(),
    })
}

/// Sorted objects of `verb` that have a holistic phrase vector and a word
/// vector and are not held out.
pub fn training_objects(
    verb: &str,
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
    excluded: &BTreeSet<String>,
) -> Vec<String> {
    let mut objects: Vec<String> = holistic
        .vectors
        .keys()
        .iter()
        .filter(|k| k.verb == verb && !excluded.contains(&k.object))
        .filter(|k| words.contains(&WordKey::noun(&k.object)))
        .map(|k| k.object.clone())
        .collect();
    objects.sort();
    objects
}

/// Object word vectors against phrase vectors, rows in sorted object order
/// so that full-batch training does not depend on how the objects arrived.
pub fn training_set(
    verb: &str,
    objects: &[String],
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
) -> Result<TrainingSet> {
    let mut objects: Vec<&String> = objects.iter().collect();
    objects.sort();
    let mut xs = Vec::with_capacity(objects.len());
    let mut ys = Vec::with_capacity(objects.len());
    for o in objects {
        xs.push(noun_vector(words, o)?);
        ys.push(holistic.get(verb, o).ok_or_else(|| Error::HolisticMiss {
            verb: verb.to_string(),
            object: o.clone(),
        })?);
    }
    TrainingSet::from_rows(&xs, &ys)
}

/// Regression settings for one verb; all matrices of a verb share them.
pub fn verb_regression(reg: &RegressionConfig, verb: &str) -> RegressionConfig {
    RegressionConfig {
        seed: derive_seed(reg.seed, verb),
        ..reg.clone()
    }
}

fn check_verbs(verbs: &[String], holistic: &HolisticPhraseSpace) -> Result<()> {
    let known = holistic_verbs(holistic);
    match verbs.iter().find(|v| known.binary_search(v).is_err()) {
        Some(v) => Err(Error::MissingResource {
            kind: "verb in relations",
            name: v.clone(),
        }),
        None => Ok(()),
    }
}

/// One matrix per verb, trained on all of its objects.
pub fn train_ambiguous(
    verbs: &[String],
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
    reg: &RegressionConfig,
    excluded: &BTreeSet<String>,
) -> Result<BTreeMap<String, VerbMatrix>> {
    check_verbs(verbs, holistic)?;
    verbs
        .par_iter()
        .map(|verb| {
            let objects = training_objects(verb, words, holistic, excluded);
            if objects.is_empty() {
                return Err(Error::MissingResource {
                    kind: "training phrases",
                    name: verb.clone(),
                });
            }
            let ts = training_set(verb, &objects, words, holistic)?;
            Ok((
                verb.clone(),
                VerbMatrix::train(verb, None, &ts, &verb_regression(reg, verb))?,
            ))
        })
        .collect()
}

/// Clusters each verb's occurrence contexts into a sense inventory.
pub fn induce_senses(
    verbs: &[String],
    inputs: &Inputs,
    words: &SemanticSpace,
    cluster: &ClusterConfig,
    excluded: &BTreeSet<String>,
) -> Result<BTreeMap<String, SenseInventory>> {
    verbs
        .par_iter()
        .map(|verb| {
            let occurrences: Vec<RelationOccurrence> = inputs
                .relations
                .iter()
                .filter(|r| &r.verb == verb && !excluded.contains(&r.object))
                .cloned()
                .collect();
            if occurrences.is_empty() {
                return Err(Error::MissingResource {
                    kind: "verb in relations",
                    name: verb.clone(),
                });
            }
            let inventory = build_sense_inventory(verb, &occurrences, &inputs.corpus, words, cluster)?;
            Ok((verb.clone(), inventory))
        })
        .collect()
}

/// Sense of each training object: its exemplar sense if clustering saw it,
/// otherwise the nearest centroid.
pub fn assign_training_objects(
    objects: &[String],
    inventory: &SenseInventory,
    words: &SemanticSpace,
) -> Result<BTreeMap<usize, Vec<String>>> {
    let mut by_sense: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for o in objects {
        let sense = match inventory.sense_of_object(o) {
            Some(s) => s,
            None => assign_object(&noun_vector(words, o)?, inventory),
        };
        by_sense.entry(sense).or_default().push(o.clone());
    }
    Ok(by_sense)
}

/// One matrix per induced sense, trained on the objects assigned to it. A
/// sense left without trainable objects falls back to all of the verb's
/// objects.
pub fn train_per_sense(
    inventories: &BTreeMap<String, SenseInventory>,
    words: &SemanticSpace,
    holistic: &HolisticPhraseSpace,
    reg: &RegressionConfig,
    excluded: &BTreeSet<String>,
) -> Result<BTreeMap<String, VerbSenses>> {
    inventories
        .par_iter()
        .map(|(verb, inventory)| {
            let objects = training_objects(verb, words, holistic, excluded);
            if objects.is_empty() {
                return Err(Error::MissingResource {
                    kind: "training phrases",
                    name: verb.clone(),
                });
            }
            let by_sense = assign_training_objects(&objects, inventory, words)?;
            let cfg = verb_regression(reg, verb);
            let mut matrices = BTreeMap::new();
            for sense in &inventory.senses {
                let members = match by_sense.get(&sense.id) {
                    Some(m) => m.as_slice(),
                    None => {
                        log::warn!(
                            "sense {} of `{verb}` has no training phrases; using all objects",
                            sense.id
                        );
                        objects.as_slice()
                    }
                };
                let ts = training_set(verb, members, words, holistic)?;
                matrices.insert(sense.id, VerbMatrix::train(verb, Some(sense.id), &ts, &cfg)?);
            }
            Ok((
                verb.clone(),
                VerbSenses {
                    inventory: inventory.clone(),
                    matrices,
                },
            ))
        })
        .collect()
}

/// Everything trained for the similarity task.
#[derive(Debug, Clone)]
pub struct Trained {
    pub ambiguous: BTreeMap<String, VerbMatrix>,
    pub senses: BTreeMap<String, VerbSenses>,
}

/// Sorted verbs of a phrase-similarity dataset.
pub fn dataset_verbs(dataset: &[PhraseSimEntry]) -> Vec<String> {
    let verbs: BTreeSet<&String> = dataset.iter().flat_map(|e| [&e.first.verb, &e.second.verb]).collect();
    verbs.into_iter().cloned().collect()
}

/// Induces senses and trains ambiguous and per-sense matrices for the
/// dataset's verbs, keeping the dataset's objects out.
pub fn train_for_similarity(
    inputs: &Inputs,
    spaces: &Spaces,
    dataset: &[PhraseSimEntry],
    cfg: &PipelineConfig,
) -> Result<Trained> {
    let excluded = heldout_objects(dataset);
    let verbs = dataset_verbs(dataset);
    let words = &spaces.words;
    let reg = cfg.regression();
    let ambiguous = train_ambiguous(&verbs, words, &spaces.holistic, &reg, &excluded)?;
    let inventories = induce_senses(&verbs, inputs, words, &cfg.cluster, &excluded)?;
    let senses = train_per_sense(&inventories, words, &spaces.holistic, &reg, &excluded)?;
    Ok(Trained { ambiguous, senses })
}

pub fn similarity_settings(cfg: &PipelineConfig) -> SimilaritySettings {
    SimilaritySettings {
        seed: cfg.seed,
        permutations: cfg.eval.permutations,
        human_agreement: cfg.eval.human_agreement,
    }
}

pub fn supervised_settings(cfg: &PipelineConfig) -> SupervisedSettings {
    SupervisedSettings {
        folds: cfg.eval.folds,
        seed: cfg.seed,
        permutations: cfg.eval.permutations,
    }
}

/// Scores every model of the comparison on the similarity dataset.
pub fn evaluate_similarity(
    spaces: &Spaces,
    trained: &Trained,
    dataset: &[PhraseSimEntry],
    cfg: &PipelineConfig,
) -> Result<SimilarityReport> {
    let res = Resources {
        words: Some(&spaces.words),
        holistic: Some(&spaces.holistic),
        ambiguous: Some(&trained.ambiguous),
        senses: Some(&trained.senses),
    };
    let models: Vec<CompositionModel<'_>> = ModelKind::ALL
        .into_iter()
        .map(|k| CompositionModel::new(k, res))
        .collect::<Result<_>>()?;
    let mut report = run_similarity_task(dataset, &models, &similarity_settings(cfg))?;
    report.config_hash = Some(cfg.hash());
    Ok(report)
}

pub fn evaluate_supervised(
    spaces: &Spaces,
    datasets: &[SenseAnnotatedDataset],
    cfg: &PipelineConfig,
) -> Result<SupervisedReport> {
    let mut report = run_supervised_task(
        datasets,
        &spaces.words,
        &spaces.holistic,
        &cfg.regression(),
        &supervised_settings(cfg),
    )?;
    report.config_hash = Some(cfg.hash());
    Ok(report)
}
