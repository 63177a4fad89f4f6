//! Holistic verb–object phrase vectors: each frequent phrase is treated as a
//! single unit and given its own distributional vector.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Pos, WordKey};
use crate::corpus_space::{weight_normalize_reduce, CooccurrenceMatrix, Vocabulary};
use crate::error::{Error, Result};
use crate::vectors::VectorSpace;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhraseKey {
    pub verb: String,
    pub object: String,
}

impl PhraseKey {
    pub fn new(verb: impl Into<String>, object: impl Into<String>) -> Self {
        PhraseKey {
            verb: verb.into(),
            object: object.into(),
        }
    }
}

impl fmt::Display for PhraseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.verb, self.object)
    }
}

impl FromStr for PhraseKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split(' ').collect::<Vec<_>>().as_slice() {
            [v, o] if !v.is_empty() && !o.is_empty() => Ok(PhraseKey::new(*v, *o)),
            _ => Err(format!("phrase key `{s}` is not `verb object`")),
        }
    }
}

/// One verb–object relation instance in the corpus (0-based positions).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationOccurrence {
    pub verb: String,
    pub object: String,
    pub sentence_index: usize,
    pub verb_position: usize,
    pub object_position: usize,
}

impl RelationOccurrence {
    pub fn key(&self) -> PhraseKey {
        PhraseKey::new(&self.verb, &self.object)
    }

    /// Checks positions and tags against the corpus.
    pub fn check(&self, corpus: &Corpus) -> Result<(), String> {
        let sentence = corpus.sentences.get(self.sentence_index).ok_or_else(|| {
            format!(
                "sentence index {} out of range ({} sentences)",
                self.sentence_index,
                corpus.sentences.len()
            )
        })?;
        let expect = |pos: usize, lemma: &str, tag: Pos, role: &str| -> Result<(), String> {
            match sentence.get(pos) {
                Some(tok) if tok.lemma == lemma && tok.pos == tag => Ok(()),
                Some(tok) => Err(format!("{role} position {pos} holds {tok}, expected {lemma}|{tag}")),
                None => Err(format!(
                    "{role} position {pos} outside sentence {}",
                    self.sentence_index
                )),
            }
        };
        expect(self.verb_position, &self.verb, Pos::V, "verb")?;
        expect(self.object_position, &self.object, Pos::N, "object")?;
        if self.verb_position == self.object_position {
            return Err("verb and object share a position".into());
        }
        Ok(())
    }
}

/// Reads `verb<TAB>object<TAB>sentence_index<TAB>verb_pos<TAB>object_pos`.
pub fn read_relations<R: BufRead>(reader: R) -> Result<Vec<RelationOccurrence>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(Error::format(i + 1, "expected 5 tab-separated relation fields"));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::format(i + 1, format!("bad index `{s}`")))
        };
        out.push(RelationOccurrence {
            verb: f[0].to_string(),
            object: f[1].to_string(),
            sentence_index: num(f[2])?,
            verb_position: num(f[3])?,
            object_position: num(f[4])?,
        });
    }
    Ok(out)
}

pub fn write_relations(relations: &[RelationOccurrence], out: &mut impl std::io::Write) -> std::io::Result<()> {
    for r in relations {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.verb, r.object, r.sentence_index, r.verb_position, r.object_position
        )?;
    }
    Ok(())
}

/// Frequent phrases with their occurrences, in key order.
pub type PhraseInventory = BTreeMap<PhraseKey, Vec<RelationOccurrence>>;

/// Groups relations by phrase and keeps those seen at least
/// `min_phrase_count` times. Relations are validated against the corpus;
/// a bad one is reported with its 1-based position in the list.
pub fn collect_phrases(
    relations: &[RelationOccurrence],
    corpus: &Corpus,
    min_phrase_count: usize,
) -> Result<PhraseInventory> {
    let mut all: PhraseInventory = BTreeMap::new();
    for (i, r) in relations.iter().enumerate() {
        r.check(corpus).map_err(|m| Error::format(i + 1, m))?;
        all.entry(r.key()).or_default().push(r.clone());
    }
    all.retain(|_, occ| occ.len() >= min_phrase_count);
    Ok(all)
}

/// Sentence positions in the union of the verb and object windows, minus
/// the verb and object themselves.
pub fn context_positions(sentence_len: usize, occ: &RelationOccurrence, window: usize) -> Vec<usize> {
    let near = |anchor: usize, j: usize| j.abs_diff(anchor) <= window;
    (0..sentence_len)
        .filter(|&j| j != occ.verb_position && j != occ.object_position)
        .filter(|&j| near(occ.verb_position, j) || near(occ.object_position, j))
        .collect()
}

#[derive(Debug, Clone)]
pub struct HolisticPhraseSpace {
    pub vectors: VectorSpace<PhraseKey>,
    /// Occurrence count per phrase, aligned with the vector rows. Empty when
    /// the space was loaded from a TSV file.
    pub frequencies: Vec<usize>,
    /// Phrases that had no basis word in any context window.
    pub zero_context: Vec<PhraseKey>,
}

impl HolisticPhraseSpace {
    pub fn from_vectors(vectors: VectorSpace<PhraseKey>) -> Self {
        HolisticPhraseSpace {
            vectors,
            frequencies: Vec::new(),
            zero_context: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn get(&self, verb: &str, object: &str) -> Option<nalgebra::DVector<f64>> {
        self.vectors.get(&PhraseKey::new(verb, object))
    }
}

/// Raw union-window counts, one row per phrase in inventory order.
pub fn count_phrase_contexts(
    corpus: &Corpus,
    inventory: &PhraseInventory,
    basis: &Vocabulary,
    window: usize,
) -> CooccurrenceMatrix {
    let mut counts = CooccurrenceMatrix::zeros(inventory.len(), basis.basis().len());
    for (row, occurrences) in inventory.values().enumerate() {
        for occ in occurrences {
            let sentence = &corpus.sentences[occ.sentence_index];
            for j in context_positions(sentence.len(), occ, window) {
                if let Some(c) = basis.basis_id(&sentence[j]) {
                    counts.add(row, c, 1);
                }
            }
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolisticConfig {
    pub min_phrase_count: usize,
    pub window: usize,
    pub svd_dim: usize,
}

impl Default for HolisticConfig {
    fn default() -> Self {
        HolisticConfig {
            min_phrase_count: 100,
            window: 5,
            svd_dim: 300,
        }
    }
}

/// Builds holistic vectors with the same weighting, normalization and SVD
/// path as the word space; the phrase matrix gets its own SVD basis.
pub fn build_holistic_vectors(
    corpus: &Corpus,
    inventory: &PhraseInventory,
    basis: &Vocabulary,
    cfg: &HolisticConfig,
    log_base: f64,
    clip_negative: bool,
) -> Result<HolisticPhraseSpace> {
    if inventory.is_empty() {
        return Err(Error::EmptyInput("phrase inventory"));
    }
    let counts = count_phrase_contexts(corpus, inventory, basis, cfg.window);
    let row_sums = counts.row_sums();
    let zero_context: Vec<PhraseKey> = inventory
        .keys()
        .zip(&row_sums)
        .filter(|(_, &s)| s == 0)
        .map(|(k, _)| k.clone())
        .collect();
    for k in &zero_context {
        log::warn!("phrase `{k}` has no context mass; kept as a zero vector");
    }
    let (vectors, provenance, _) = weight_normalize_reduce(&counts, cfg.svd_dim, log_base, clip_negative)?;
    let keys: Vec<PhraseKey> = inventory.keys().cloned().collect();
    Ok(HolisticPhraseSpace {
        vectors: VectorSpace::new(keys, vectors, provenance)?,
        frequencies: inventory.values().map(Vec::len).collect(),
        zero_context,
    })
}

/// Convenience for tests and tools: word keys of a phrase.
pub fn phrase_words(key: &PhraseKey) -> (WordKey, WordKey) {
    (WordKey::verb(&key.verb), WordKey::noun(&key.object))
}
