//! Word-level distributional space: vocabulary selection, windowed
//! co-occurrence counts, LMI weighting, row normalization and SVD.

mod cooccur;
mod svd;
mod vocab;
mod weighting;
mod wordsim;

pub use cooccur::{count_cooccurrences, CooccurrenceMatrix};
pub use svd::{reduce_svd, Reduction};
pub use vocab::{build_vocabulary, word_frequencies, Vocabulary};
pub use weighting::{normalize_rows, weight_lmi};
pub use wordsim::{evaluate_wordsim, lookup_word, read_wordsim, WordSimPair, WordSimResult};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, StopList, WordKey};
use crate::error::{Error, Result};
use crate::vectors::{Provenance, VectorSpace};

pub type SemanticSpace = VectorSpace<WordKey>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub window: usize,
    pub basis_size: usize,
    pub top_exclusions: usize,
    pub min_occurrences: u64,
    pub svd_dim: usize,
    /// Base of the logarithm in PMI; it rescales LMI uniformly.
    pub pmi_log_base: f64,
    pub clip_negative_lmi: bool,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            window: 5,
            basis_size: 2000,
            top_exclusions: 50,
            min_occurrences: 100,
            svd_dim: 300,
            pmi_log_base: std::f64::consts::E,
            clip_negative_lmi: false,
        }
    }
}

impl SpaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.basis_size == 0 || self.min_occurrences == 0 || self.svd_dim == 0 {
            return Err(Error::Config(
                "window, basis_size, min_occurrences and svd_dim must be positive".into(),
            ));
        }
        if self.svd_dim > self.basis_size {
            return Err(Error::Config(format!(
                "svd_dim ({}) exceeds basis_size ({})",
                self.svd_dim, self.basis_size
            )));
        }
        if self.pmi_log_base.is_nan() || self.pmi_log_base <= 1.0 {
            return Err(Error::Config("pmi_log_base must exceed 1".into()));
        }
        Ok(())
    }
}

/// Weighting, normalization and reduction applied to any count matrix.
/// Both the word space and the holistic phrase space go through here.
pub fn weight_normalize_reduce(
    counts: &CooccurrenceMatrix,
    svd_dim: usize,
    log_base: f64,
    clip_negative: bool,
) -> Result<(nalgebra::DMatrix<f64>, Provenance, Vec<f64>)> {
    let mut weighted = weight_lmi(counts, log_base, clip_negative)?;
    normalize_rows(&mut weighted);
    let reduction = reduce_svd(&weighted, svd_dim)?;
    let provenance = Provenance {
        weighted: true,
        normalized: false,
        reduced_to: Some(svd_dim),
    };
    Ok((reduction.projected, provenance, reduction.singular_values))
}

/// A built word space together with what it was built from.
#[derive(Debug, Clone)]
pub struct BuiltSpace {
    pub vocabulary: Vocabulary,
    pub space: SemanticSpace,
    pub singular_values: Vec<f64>,
}

pub fn build_space(corpus: &Corpus, stop: &StopList, cfg: &SpaceConfig) -> Result<BuiltSpace> {
    cfg.validate()?;
    let vocabulary = build_vocabulary(corpus, stop, cfg)?;
    if vocabulary.targets().is_empty() || vocabulary.basis().is_empty() {
        return Err(Error::InvalidArgument(format!(
            "vocabulary is empty ({} targets, {} basis words)",
            vocabulary.targets().len(),
            vocabulary.basis().len()
        )));
    }
    let counts = count_cooccurrences(corpus, &vocabulary, cfg.window);
    let (vectors, provenance, singular_values) =
        weight_normalize_reduce(&counts, cfg.svd_dim, cfg.pmi_log_base, cfg.clip_negative_lmi)?;
    let space = VectorSpace::new(vocabulary.targets().to_vec(), vectors, provenance)?;
    Ok(BuiltSpace {
        vocabulary,
        space,
        singular_values,
    })
}
