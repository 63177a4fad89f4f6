use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use verbsense::composition::{CompositionModel, ModelKind, Resources};
use verbsense::corpus_space::build_vocabulary;
use verbsense::eval::{read_phrase_sim, read_sense_annotated, PhraseSimEntry};
use verbsense::experiment::{
    build_holistic_space, dataset_verbs, evaluate_similarity, evaluate_supervised, heldout_objects, holistic_verbs,
    induce_senses, train_ambiguous, train_per_sense, Inputs, Spaces, Trained,
};
use verbsense::holistic::{read_relations, RelationOccurrence};
use verbsense::linalg::fmt_f64;
use verbsense::synth::generate_synthetic;
use verbsense::{Corpus, Error, HolisticPhraseSpace, PipelineConfig, Result, SenseInventory, StopList};

use crate::artifacts::{Store, HOLISTIC, SPACE};

pub const SYNTH_CONFIG: &str = "verbsense.toml";

/// A configured input file, which must exist when the command starts.
fn input_path<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    let path = path
        .as_deref()
        .ok_or_else(|| Error::Config(format!("`paths.{key}` is not set")))?;
    if !path.is_file() {
        return Err(Error::Config(format!("paths.{key}: {} does not exist", path.display())));
    }
    Ok(path)
}

fn read_input<T>(path: &Path, parse: impl FnOnce(BufReader<File>) -> Result<T>) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    parse(BufReader::new(file)).map_err(|e| e.in_file(path))
}

fn corpus(cfg: &PipelineConfig) -> Result<Corpus> {
    read_input(input_path(&cfg.paths.corpus, "corpus")?, Corpus::read)
}

fn stoplist(cfg: &PipelineConfig) -> Result<StopList> {
    read_input(input_path(&cfg.paths.stoplist, "stoplist")?, StopList::read)
}

fn relations(cfg: &PipelineConfig) -> Result<Vec<RelationOccurrence>> {
    read_input(input_path(&cfg.paths.relations, "relations")?, read_relations)
}

fn inputs(cfg: &PipelineConfig) -> Result<Inputs> {
    // check every path before the slow reads
    input_path(&cfg.paths.corpus, "corpus")?;
    input_path(&cfg.paths.stoplist, "stoplist")?;
    input_path(&cfg.paths.relations, "relations")?;
    Ok(Inputs {
        corpus: corpus(cfg)?,
        stoplist: stoplist(cfg)?,
        relations: relations(cfg)?,
    })
}

fn similarity_dataset(cfg: &PipelineConfig) -> Result<Option<Vec<PhraseSimEntry>>> {
    match &cfg.paths.similarity_dataset {
        None => Ok(None),
        some => read_input(input_path(some, "similarity_dataset")?, read_phrase_sim).map(Some),
    }
}

/// Objects of the similarity dataset stay out of training and induction.
fn excluded_objects(cfg: &PipelineConfig) -> Result<BTreeSet<String>> {
    Ok(similarity_dataset(cfg)?.map_or_else(BTreeSet::new, |d| heldout_objects(&d)))
}

/// Verbs named on the command line, else those of the similarity dataset,
/// else `fallback`.
fn select_verbs(
    requested: &[String],
    cfg: &PipelineConfig,
    fallback: impl FnOnce() -> Vec<String>,
) -> Result<Vec<String>> {
    if !requested.is_empty() {
        let set: BTreeSet<String> = requested.iter().cloned().collect();
        return Ok(set.into_iter().collect());
    }
    let verbs = match similarity_dataset(cfg)? {
        Some(d) if !d.is_empty() => dataset_verbs(&d),
        _ => fallback(),
    };
    if verbs.is_empty() {
        log::warn!("no verbs selected; nothing to do");
    }
    Ok(verbs)
}

fn announce(store: &Store, written: &[String]) {
    for rel in written {
        println!("wrote {}", store.path(rel).display());
    }
}

pub fn synth(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let spec = &cfg.synth;
    let data = generate_synthetic(spec)?;
    data.write_to(out)?;
    let run_cfg = PipelineConfig::for_synthetic(spec);
    let path = out.join(SYNTH_CONFIG);
    std::fs::write(&path, run_cfg.to_toml()?).map_err(|e| Error::from(e).in_file(&path))?;
    println!(
        "wrote synthetic corpus ({} sentences, {} relations) to {}; run with --config {}",
        data.corpus.sentences.len(),
        data.relations.len(),
        out.display(),
        path.display()
    );
    Ok(())
}

pub fn build_space(cfg: &PipelineConfig, store: &Store) -> Result<()> {
    let corpus = corpus(cfg)?;
    let stop = stoplist(cfg)?;
    let built = verbsense::corpus_space::build_space(&corpus, &stop, &cfg.space)?;
    let space = built.space.with_config_hash(store.hash());
    store.write(SPACE, |out| space.write_tsv(out))?;
    let written = [SPACE.to_string()];
    store.record("build-space", &written)?;
    announce(store, &written);
    Ok(())
}

pub fn build_holistic(cfg: &PipelineConfig, store: &Store) -> Result<()> {
    let inputs = inputs(cfg)?;
    let vocabulary = build_vocabulary(&inputs.corpus, &inputs.stoplist, &cfg.space)?;
    let mut holistic = build_holistic_space(&inputs, &vocabulary, cfg)?;
    holistic.vectors.config_hash = Some(store.hash().to_string());
    store.write(HOLISTIC, |out| holistic.vectors.write_tsv(out))?;
    let written = [HOLISTIC.to_string()];
    store.record("build-holistic", &written)?;
    announce(store, &written);
    Ok(())
}

fn relation_verbs(relations: &[RelationOccurrence]) -> Vec<String> {
    let verbs: BTreeSet<&String> = relations.iter().map(|r| &r.verb).collect();
    verbs.into_iter().cloned().collect()
}

fn write_inventories(store: &Store, inventories: &mut BTreeMap<String, SenseInventory>) -> Result<Vec<String>> {
    let mut written = Vec::new();
    for (verb, inventory) in inventories.iter_mut() {
        inventory.config_hash = Some(store.hash().to_string());
        let rel = Store::senses_rel(verb);
        let text = inventory.to_json()? + "\n";
        store.write(&rel, |out| out.write_all(text.as_bytes()))?;
        written.push(rel);
    }
    Ok(written)
}

pub fn induce(cfg: &PipelineConfig, store: &Store, requested: &[String]) -> Result<()> {
    let inputs = inputs(cfg)?;
    let words = store.load_space()?;
    let verbs = select_verbs(requested, cfg, || relation_verbs(&inputs.relations))?;
    let excluded = excluded_objects(cfg)?;
    let mut inventories = induce_senses(&verbs, &inputs, &words, &cfg.cluster, &excluded)?;
    let written = write_inventories(store, &mut inventories)?;
    store.record("induce-senses", &written)?;
    for (verb, inv) in &inventories {
        log::info!("{verb}: {} senses", inv.senses.len());
    }
    announce(store, &written);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    Ambiguous,
    PerSense,
}

pub fn train(cfg: &PipelineConfig, store: &Store, mode: TrainMode, requested: &[String]) -> Result<()> {
    let words = store.load_space()?;
    let holistic = store.load_holistic()?;
    let verbs = select_verbs(requested, cfg, || holistic_verbs(&holistic))?;
    let excluded = excluded_objects(cfg)?;
    let reg = cfg.regression();
    let mut written = Vec::new();
    match mode {
        TrainMode::Ambiguous => {
            let matrices = train_ambiguous(&verbs, &words, &holistic, &reg, &excluded)?;
            for (verb, mut vm) in matrices {
                vm.config_hash = Some(store.hash().to_string());
                let rel = Store::ambiguous_rel(&verb);
                store.write(&rel, |out| vm.write_tsv(out))?;
                written.push(rel);
            }
        }
        TrainMode::PerSense => {
            // reuse induced inventories, inducing the missing ones
            let mut inventories = BTreeMap::new();
            let mut to_induce = Vec::new();
            for verb in &verbs {
                if store.exists(&Store::senses_rel(verb)) {
                    inventories.insert(verb.clone(), store.load_inventory(verb)?);
                } else {
                    to_induce.push(verb.clone());
                }
            }
            if !to_induce.is_empty() {
                let inputs = inputs(cfg)?;
                let mut induced = induce_senses(&to_induce, &inputs, &words, &cfg.cluster, &excluded)?;
                written.extend(write_inventories(store, &mut induced)?);
                inventories.extend(induced);
            }
            let senses = train_per_sense(&inventories, &words, &holistic, &reg, &excluded)?;
            for (verb, vs) in senses {
                for (id, mut vm) in vs.matrices {
                    vm.config_hash = Some(store.hash().to_string());
                    let rel = Store::sense_matrix_rel(&verb, id);
                    store.write(&rel, |out| vm.write_tsv(out))?;
                    written.push(rel);
                }
            }
        }
    }
    store.record("train", &written)?;
    announce(store, &written);
    Ok(())
}

/// Reads `verb<TAB>object` lines; blank lines and `#` comments are skipped.
fn read_phrases(path: &Path) -> Result<Vec<(String, String)>> {
    read_input(path, |reader| {
        let mut phrases = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next()) {
                (Some(v), Some(o)) if !v.is_empty() && !o.is_empty() => phrases.push((v.to_string(), o.to_string())),
                _ => return Err(Error::format(i + 1, "expected `verb<TAB>object`")),
            }
        }
        Ok(phrases)
    })
}

/// Keeps loading after a missing artifact so that all of them get named.
fn gather<T>(loaded: Result<T>, missing: &mut Vec<String>) -> Result<Option<T>> {
    match loaded {
        Ok(x) => Ok(Some(x)),
        Err(Error::MissingArtifact(names)) => {
            missing.push(names);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn all_present(missing: Vec<String>) -> Result<()> {
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingArtifact(missing.join(", ")))
    }
}

pub fn compose(store: &Store, model: ModelKind, phrases: &Path, output: Option<&Path>) -> Result<()> {
    let phrases = read_phrases(phrases)?;
    let verbs: Vec<String> = phrases
        .iter()
        .map(|(v, _)| v.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut missing = Vec::new();
    let words = match model {
        ModelKind::HolisticLookup => None,
        _ => gather(store.load_space(), &mut missing)?,
    };
    let holistic = match model {
        ModelKind::HolisticLookup => gather(store.load_holistic(), &mut missing)?,
        _ => None,
    };
    let ambiguous = match model {
        ModelKind::AmbiguousMatrix => gather(store.load_ambiguous(&verbs), &mut missing)?,
        _ => None,
    };
    let senses = match model {
        ModelKind::DisambiguatedMatrix => gather(store.load_senses(&verbs), &mut missing)?,
        _ => None,
    };
    all_present(missing)?;
    let composer = CompositionModel::new(
        model,
        Resources {
            words: words.as_ref(),
            holistic: holistic.as_ref(),
            ambiguous: ambiguous.as_ref(),
            senses: senses.as_ref(),
        },
    )?;

    let mut rows = Vec::with_capacity(phrases.len());
    for (verb, object) in &phrases {
        match composer.compose(verb, object) {
            Ok(v) => rows.push((verb, object, v)),
            Err(e @ (Error::MissingResource { .. } | Error::HolisticMiss { .. })) => {
                log::warn!("skipping `{verb} {object}`: {e}")
            }
            Err(e) => return Err(e),
        }
    }
    let dim = rows.first().map_or(0, |r| r.2.len());
    let mut text = format!("#model {model} #dim {dim} #config {}\n", store.hash());
    for (verb, object, v) in rows {
        text.push_str(&format!("{verb}\t{object}\t{model}"));
        for x in v.iter() {
            text.push('\t');
            text.push_str(&fmt_f64(*x));
        }
        text.push('\n');
    }
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::from(e).in_file(path)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Error::from),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Supervised,
    Similarity,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Supervised => "supervised",
            Task::Similarity => "similarity",
        }
    }
}

pub fn evaluate(cfg: &PipelineConfig, store: &Store, task: Task) -> Result<()> {
    let (json, table) = match task {
        Task::Supervised => {
            let path = input_path(&cfg.paths.supervised_dataset, "supervised_dataset")?;
            let datasets = read_input(path, read_sense_annotated)?;
            let mut missing = Vec::new();
            let words = gather(store.load_space(), &mut missing)?;
            let holistic = gather(store.load_holistic(), &mut missing)?;
            all_present(missing)?;
            let spaces = Spaces {
                words: words.expect("present"),
                holistic: holistic.expect("present"),
            };
            let report = evaluate_supervised(&spaces, &datasets, cfg)?;
            (report.to_json()?, report.table_tsv())
        }
        Task::Similarity => {
            let dataset = similarity_dataset(cfg)?
                .ok_or_else(|| Error::Config("`paths.similarity_dataset` is not set".into()))?;
            let verbs = dataset_verbs(&dataset);
            let mut missing = Vec::new();
            let words = gather(store.load_space(), &mut missing)?;
            let holistic: Option<HolisticPhraseSpace> = gather(store.load_holistic(), &mut missing)?;
            let ambiguous = gather(store.load_ambiguous(&verbs), &mut missing)?;
            let senses = gather(store.load_senses(&verbs), &mut missing)?;
            all_present(missing)?;
            let spaces = Spaces {
                words: words.expect("present"),
                holistic: holistic.expect("present"),
            };
            let trained = Trained {
                ambiguous: ambiguous.expect("present"),
                senses: senses.expect("present"),
            };
            let report = evaluate_similarity(&spaces, &trained, &dataset, cfg)?;
            (report.to_json()?, report.table_tsv())
        }
    };
    let json_rel = Store::report_rel(task.name(), "json");
    let tsv_rel = Store::report_rel(task.name(), "tsv");
    store.write(&json_rel, |out| writeln!(out, "{json}"))?;
    store.write(&tsv_rel, |out| out.write_all(table.as_bytes()))?;
    let written = [json_rel, tsv_rel];
    store.record("evaluate", &written)?;
    print!("{table}");
    announce(store, &written);
    Ok(())
}
