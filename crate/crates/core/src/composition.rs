//! Composite phrase vectors under each compared model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::corpus::WordKey;
use crate::corpus_space::SemanticSpace;
use crate::error::{Error, Result};
use crate::holistic::HolisticPhraseSpace;
use crate::linalg::cosine_vec;
use crate::regression::{apply_verb, VerbMatrix};
use crate::sense::{assign_object, SenseInventory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    AmbiguousMatrix,
    DisambiguatedMatrix,
    Additive,
    Multiplicative,
    VerbsOnly,
    HolisticLookup,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::VerbsOnly,
        ModelKind::Additive,
        ModelKind::Multiplicative,
        ModelKind::AmbiguousMatrix,
        ModelKind::DisambiguatedMatrix,
        ModelKind::HolisticLookup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::AmbiguousMatrix => "ambiguous",
            ModelKind::DisambiguatedMatrix => "disambiguated",
            ModelKind::Additive => "additive",
            ModelKind::Multiplicative => "multiplicative",
            ModelKind::VerbsOnly => "verbs_only",
            ModelKind::HolisticLookup => "holistic",
        }
    }

    /// Matrix and holistic models live in phrase space; the rest in word space.
    pub fn in_phrase_space(self) -> bool {
        matches!(
            self,
            ModelKind::AmbiguousMatrix | ModelKind::DisambiguatedMatrix | ModelKind::HolisticLookup
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

/// Sense inventory of a verb with one trained matrix per sense id.
#[derive(Debug, Clone, PartialEq)]
pub struct VerbSenses {
    pub inventory: SenseInventory,
    pub matrices: BTreeMap<usize, VerbMatrix>,
}

/// Everything a composition model may draw on. Fields a model does not
/// need can be left empty.
#[derive(Debug, Clone, Copy, Default)]
pub struct Resources<'a> {
    pub words: Option<&'a SemanticSpace>,
    pub holistic: Option<&'a HolisticPhraseSpace>,
    pub ambiguous: Option<&'a BTreeMap<String, VerbMatrix>>,
    pub senses: Option<&'a BTreeMap<String, VerbSenses>>,
}

#[derive(Debug, Clone, Copy)]
pub struct CompositionModel<'a> {
    pub kind: ModelKind,
    res: Resources<'a>,
}

fn missing(kind: &'static str, name: impl Into<String>) -> Error {
    Error::MissingResource {
        kind,
        name: name.into(),
    }
}

impl<'a> CompositionModel<'a> {
    /// Binds a model to its resources, checking that the ones it needs exist.
    pub fn new(kind: ModelKind, res: Resources<'a>) -> Result<Self> {
        if kind != ModelKind::HolisticLookup && res.words.is_none() {
            return Err(missing("resource", "word space"));
        }
        match kind {
            ModelKind::HolisticLookup if res.holistic.is_none() => {
                return Err(missing("resource", "holistic phrase space"))
            }
            ModelKind::AmbiguousMatrix if res.ambiguous.is_none() => {
                return Err(missing("resource", "ambiguous verb matrices"))
            }
            ModelKind::DisambiguatedMatrix if res.senses.is_none() => {
                return Err(missing("resource", "sense inventories and sense matrices"))
            }
            _ => {}
        }
        Ok(CompositionModel { kind, res })
    }

    fn word(&self, key: WordKey) -> Result<DVector<f64>> {
        let space = self.res.words.expect("checked in new");
        space.get(&key).ok_or_else(|| missing("word vector", key.to_string()))
    }

    /// Sense the disambiguated model picks for `object` under `verb`.
    pub fn select_sense(&self, verb: &str, object: &str) -> Result<usize> {
        let senses = self
            .res
            .senses
            .ok_or_else(|| missing("resource", "sense inventories"))?;
        let vs = senses.get(verb).ok_or_else(|| missing("sense inventory", verb))?;
        Ok(assign_object(&self.word(WordKey::noun(object))?, &vs.inventory))
    }

    pub fn compose(&self, verb: &str, object: &str) -> Result<DVector<f64>> {
        match self.kind {
            ModelKind::AmbiguousMatrix => {
                let matrices = self.res.ambiguous.expect("checked in new");
                let vm = matrices.get(verb).ok_or_else(|| missing("verb matrix", verb))?;
                apply_verb(vm, &self.word(WordKey::noun(object))?)
            }
            ModelKind::DisambiguatedMatrix => {
                let senses = self.res.senses.expect("checked in new");
                let vs = senses.get(verb).ok_or_else(|| missing("sense inventory", verb))?;
                let noun = self.word(WordKey::noun(object))?;
                let sense = assign_object(&noun, &vs.inventory);
                let vm = vs
                    .matrices
                    .get(&sense)
                    .ok_or_else(|| missing("sense matrix", format!("{verb}#{sense}")))?;
                apply_verb(vm, &noun)
            }
            ModelKind::Additive => Ok(self.word(WordKey::verb(verb))? + self.word(WordKey::noun(object))?),
            ModelKind::Multiplicative => Ok(self
                .word(WordKey::verb(verb))?
                .component_mul(&self.word(WordKey::noun(object))?)),
            ModelKind::VerbsOnly => self.word(WordKey::verb(verb)),
            ModelKind::HolisticLookup => {
                let h = self.res.holistic.expect("checked in new");
                h.get(verb, object).ok_or_else(|| Error::HolisticMiss {
                    verb: verb.to_string(),
                    object: object.to_string(),
                })
            }
        }
    }

    /// Cosine of the two composites; 0 with `zero_vector` set when either
    /// composite is the zero vector.
    pub fn pair_similarity(&self, first: (&str, &str), second: (&str, &str)) -> Result<PairSimilarity> {
        let a = self.compose(first.0, first.1)?;
        let b = self.compose(second.0, second.1)?;
        if a.len() != b.len() {
            return Err(Error::ShapeMismatch {
                context: "composite vectors of one model",
                expected: (a.len(), 1),
                found: (b.len(), 1),
            });
        }
        Ok(match cosine_vec(&a, &b) {
            Some(cosine) => PairSimilarity {
                cosine,
                zero_vector: false,
            },
            None => PairSimilarity {
                cosine: 0.0,
                zero_vector: true,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSimilarity {
    pub cosine: f64,
    pub zero_vector: bool,
}
