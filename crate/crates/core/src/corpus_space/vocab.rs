use std::cmp::Reverse;
use std::collections::HashMap;

use crate::corpus::{Corpus, StopList, WordKey};
use crate::error::{Error, Result};

use super::SpaceConfig;

/// Target rows and basis columns of a co-occurrence space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    targets: Vec<WordKey>,
    basis: Vec<WordKey>,
    target_index: HashMap<WordKey, usize>,
    basis_index: HashMap<WordKey, usize>,
}

impl Vocabulary {
    pub fn new(targets: Vec<WordKey>, basis: Vec<WordKey>) -> Result<Self> {
        let target_index = index_of(&targets, "target")?;
        let basis_index = index_of(&basis, "basis")?;
        if let Some(w) = basis.iter().find(|w| !w.pos.is_content()) {
            return Err(Error::InvalidArgument(format!("basis word {w} is not a content word")));
        }
        Ok(Vocabulary {
            targets,
            basis,
            target_index,
            basis_index,
        })
    }

    pub fn targets(&self) -> &[WordKey] {
        &self.targets
    }

    pub fn basis(&self) -> &[WordKey] {
        &self.basis
    }

    pub fn target_id(&self, w: &WordKey) -> Option<usize> {
        self.target_index.get(w).copied()
    }

    pub fn basis_id(&self, w: &WordKey) -> Option<usize> {
        self.basis_index.get(w).copied()
    }
}

fn index_of(words: &[WordKey], what: &str) -> Result<HashMap<WordKey, usize>> {
    let mut index = HashMap::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        if index.insert(w.clone(), i).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate {what} word {w}")));
        }
    }
    Ok(index)
}

/// Token frequencies of the corpus.
pub fn word_frequencies(corpus: &Corpus) -> HashMap<WordKey, u64> {
    let mut freq = HashMap::new();
    for tok in corpus.sentences.iter().flatten() {
        *freq.entry(tok.clone()).or_insert(0) += 1;
    }
    freq
}

/// Content words by descending frequency, ties in (lemma, pos) order.
fn ranked_content_words(freq: &HashMap<WordKey, u64>) -> Vec<(&WordKey, u64)> {
    let mut ranked: Vec<_> = freq
        .iter()
        .filter(|(w, _)| w.pos.is_content())
        .map(|(w, &c)| (w, c))
        .collect();
    ranked.sort_by(|a, b| (Reverse(a.1), a.0).cmp(&(Reverse(b.1), b.0)));
    ranked
}

/// Selects targets and basis words.
///
/// Basis: content words ranked by frequency, stop-listed lemmas removed,
/// the `top_exclusions` most frequent of the remainder dropped, then the
/// next `basis_size` taken. Targets: every content word occurring at least
/// `min_occurrences` times, in the same ranking order.
pub fn build_vocabulary(corpus: &Corpus, stop: &StopList, cfg: &SpaceConfig) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let freq = word_frequencies(corpus);
    let ranked = ranked_content_words(&freq);
    if ranked.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let basis = ranked
        .iter()
        .filter(|(w, _)| !stop.contains(&w.lemma))
        .skip(cfg.top_exclusions)
        .take(cfg.basis_size)
        .map(|(w, _)| (*w).clone())
        .collect();
    let targets = ranked
        .iter()
        .filter(|(_, c)| *c >= cfg.min_occurrences)
        .map(|(w, _)| (*w).clone())
        .collect();
    Vocabulary::new(targets, basis)
}
