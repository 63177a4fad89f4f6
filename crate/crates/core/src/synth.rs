//! Planted-sense corpora for exercising the whole pipeline at desk scale.
//!
//! Every verb sense is tied to a topic, a block of context words with its
//! own generating map; the senses of one verb have distinct topics, and a
//! topic is shared by senses of different verbs (near-synonymous senses).
//! Every verb also has a shared block, and a background block is common to
//! all phrases. Each object has a non-negative latent vector `z`. A phrase's
//! context distribution over these words is
//!
//! ```text
//! max(0, δ·M_topic z ⊕ (1 − δ)·M_verb z ⊕ β·M_bg z + σ·μ·ε)
//! ```
//!
//! with `δ` the disjointness, `β` the background weight, `μ` the mean of the
//! noise-free weights over the phrase's support and `ε` standard normal.
//! Sense `s` of verb `v` uses topic `(v + s) mod topics`.
//! Nouns additionally occur in their own sentences whose context words are
//! drawn in proportion to `A z`, which is what ties object word vectors to
//! the latent vectors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Pos, Sentence, StopList, WordKey};
use crate::error::{Error, Result};
use crate::eval::{write_phrase_sim, write_sense_annotated, PhraseSimEntry, SenseAnnotatedDataset};
use crate::holistic::{write_relations, PhraseKey, RelationOccurrence};
use crate::linalg::cosine_vec;

/// Noise levels of a sweep; the middle one is the benchmark default.
pub const NOISE_LEVELS: [f64; 3] = [0.0, 0.5, 1.0];

/// Context words on each side of the verb and the object in phrase sentences.
const PHRASE_SIDE: usize = 3;
/// Context words on each side of the noun in noun sentences.
const NOUN_SIDE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub verbs: usize,
    pub senses_per_verb: usize,
    /// Objects per sense listed in the sense-annotated dataset.
    pub objects_per_sense: usize,
    /// Further objects per sense kept out of training; their phrases make up
    /// the similarity dataset.
    pub heldout_per_sense: usize,
    pub latent_dim: usize,
    /// Size of the vocabulary noun sentences draw from.
    pub noun_context_words: usize,
    /// Number of sense topics shared out among the verbs.
    pub topics: usize,
    /// Size of each topic and verb phrase-context block.
    pub block_size: usize,
    pub background_words: usize,
    pub background_weight: f64,
    /// 1 gives every sense of a verb its own context block; 0 makes all
    /// senses of a verb share one map.
    pub disjointness: f64,
    /// Noise scale relative to the mean noise-free weight.
    pub noise: f64,
    /// Corpus occurrences per verb-object phrase.
    pub phrase_occurrences: usize,
    pub noun_sentences: usize,
    pub similarity_pairs: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            verbs: 5,
            senses_per_verb: 2,
            objects_per_sense: 16,
            heldout_per_sense: 4,
            latent_dim: 4,
            noun_context_words: 40,
            topics: 5,
            block_size: 12,
            background_words: 12,
            background_weight: 0.25,
            disjointness: 1.0,
            noise: NOISE_LEVELS[1],
            phrase_occurrences: 50,
            noun_sentences: 1000,
            similarity_pairs: 108,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Infeasible(m.to_string()));
        if self.verbs == 0 || self.senses_per_verb == 0 {
            return bad("need at least one verb with at least one sense");
        }
        if self.objects_per_sense < 4 {
            return bad("objects_per_sense must be at least 4");
        }
        if self.latent_dim == 0 || self.noun_context_words == 0 || self.block_size == 0 {
            return bad("latent_dim, noun_context_words and block_size must be positive");
        }
        if self.topics < self.senses_per_verb {
            return bad("topics must be at least senses_per_verb so that senses of a verb differ");
        }
        if !(0.0..=1.0).contains(&self.disjointness) {
            return bad("disjointness must lie in [0, 1]");
        }
        if [self.noise, self.background_weight]
            .iter()
            .any(|x| x.is_nan() || *x < 0.0)
        {
            return bad("noise and background_weight must be non-negative");
        }
        if self.background_weight > 0.0 && self.background_words == 0 {
            return bad("a background weight needs background words");
        }
        if self.phrase_occurrences == 0 {
            return bad("phrase_occurrences must be positive");
        }
        Ok(())
    }

    /// Number of phrase-context words: topic blocks, verb blocks and the
    /// background.
    pub fn context_vocabulary_size(&self) -> usize {
        (self.topics + self.verbs) * self.block_size + self.background_words
    }

    pub fn topic_of(&self, verb: usize, sense: usize) -> usize {
        (verb + sense) % self.topics
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSense {
    pub topic: usize,
    pub training: Vec<String>,
    pub heldout: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedVerb {
    pub verb: String,
    pub senses: Vec<PlantedSense>,
}

/// What the generator planted, for scoring recovered structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SyntheticSpec,
    pub verbs: Vec<PlantedVerb>,
    pub context_words: Vec<String>,
    pub latent: BTreeMap<String, Vec<f64>>,
    /// Context distribution (unnormalized) of each phrase over
    /// `context_words`, keyed by `verb object`.
    pub phrase_weights: BTreeMap<String, Vec<f64>>,
}

impl GroundTruth {
    /// Planted sense index of an object under a verb.
    pub fn sense_of(&self, verb: &str, object: &str) -> Option<usize> {
        let v = self.verbs.iter().find(|v| v.verb == verb)?;
        v.senses
            .iter()
            .position(|s| s.training.iter().chain(&s.heldout).any(|o| o == object))
    }

    /// Cosine between the planted context distributions of two phrases.
    pub fn planted_similarity(&self, a: &PhraseKey, b: &PhraseKey) -> Option<f64> {
        let wa = DVector::from_column_slice(self.phrase_weights.get(&a.to_string())?);
        let wb = DVector::from_column_slice(self.phrase_weights.get(&b.to_string())?);
        Some(cosine_vec(&wa, &wb).unwrap_or(0.0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub corpus: Corpus,
    pub relations: Vec<RelationOccurrence>,
    pub stoplist: StopList,
    pub supervised: Vec<SenseAnnotatedDataset>,
    pub similarity: Vec<PhraseSimEntry>,
    pub truth: GroundTruth,
}

/// File names written by [`SyntheticData::write_to`].
pub mod files {
    pub const CORPUS: &str = "corpus.txt";
    pub const RELATIONS: &str = "relations.tsv";
    pub const STOPLIST: &str = "stoplist.txt";
    pub const SUPERVISED: &str = "supervised.tsv";
    pub const SIMILARITY: &str = "similarity.tsv";
    pub const TRUTH: &str = "truth.json";
}

impl SyntheticData {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let create = |name: &str| -> Result<std::io::BufWriter<std::fs::File>> {
            Ok(std::io::BufWriter::new(std::fs::File::create(dir.join(name))?))
        };
        let mut out = create(files::CORPUS)?;
        self.corpus.write_to(&mut out)?;
        out.flush()?;
        let mut out = create(files::RELATIONS)?;
        write_relations(&self.relations, &mut out)?;
        out.flush()?;
        let mut stop: Vec<&String> = self.stoplist.0.iter().collect();
        stop.sort();
        let mut out = create(files::STOPLIST)?;
        for w in stop {
            writeln!(out, "{w}")?;
        }
        out.flush()?;
        let mut out = create(files::SUPERVISED)?;
        write_sense_annotated(&self.supervised, &mut out)?;
        out.flush()?;
        let mut out = create(files::SIMILARITY)?;
        write_phrase_sim(&self.similarity, &mut out)?;
        out.flush()?;
        std::fs::write(dir.join(files::TRUTH), self.truth.to_json()?)?;
        Ok(())
    }
}

fn exp_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| Exp1.sample(rng))
}

fn sample_words(weights: &[f64], words: &[WordKey], count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<WordKey>> {
    let dist = WeightedIndex::new(weights)
        .map_err(|e| Error::Infeasible(format!("context distribution cannot be sampled: {e}")))?;
    Ok((0..count).map(|_| words[dist.sample(rng)].clone()).collect())
}

/// Generates corpus, relations, datasets and ground truth from `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.latent_dim;
    let b = spec.block_size;

    let noun_context: Vec<WordKey> = (0..spec.noun_context_words)
        .map(|i| WordKey::new(format!("attr{i:03}"), Pos::J))
        .collect();
    let context_words: Vec<WordKey> = (0..spec.context_vocabulary_size())
        .map(|i| WordKey::new(format!("ctx{i:03}"), Pos::N))
        .collect();
    // layout: topic blocks, verb blocks, background
    let topic_start = |t: usize| t * b;
    let verb_start = |v: usize| (spec.topics + v) * b;
    let background_start = (spec.topics + spec.verbs) * b;

    let noun_map = exp_matrix(spec.noun_context_words, r, &mut rng);
    let background_map = exp_matrix(spec.background_words, r, &mut rng);
    let topic_maps: Vec<DMatrix<f64>> = (0..spec.topics).map(|_| exp_matrix(b, r, &mut rng)).collect();

    let article = WordKey::new("the", Pos::O);
    let mut sentences: Vec<Sentence> = Vec::new();
    // phrase sentence index -> (verb, object)
    let mut phrase_sentences: Vec<(usize, String)> = Vec::new();
    let mut verbs = Vec::with_capacity(spec.verbs);
    let mut latent = BTreeMap::new();
    let mut phrase_weights = BTreeMap::new();
    let mut heldout_phrases: Vec<(PhraseKey, usize, usize)> = Vec::new();
    let mut next_object = 0usize;

    for v in 0..spec.verbs {
        let verb = format!("verb{v}");
        let verb_key = WordKey::verb(&verb);
        let verb_map = exp_matrix(b, r, &mut rng);
        let mut senses = Vec::with_capacity(spec.senses_per_verb);
        for s in 0..spec.senses_per_verb {
            let topic = spec.topic_of(v, s);
            let mut planted = PlantedSense {
                topic,
                training: Vec::new(),
                heldout: Vec::new(),
            };
            for j in 0..spec.objects_per_sense + spec.heldout_per_sense {
                let object = format!("obj{next_object:04}");
                next_object += 1;
                let z = DVector::from_fn(r, |_, _| Exp1.sample(&mut rng));

                let mut signal = vec![0.0; context_words.len()];
                let mut support = Vec::new();
                let mut place = |start: usize, values: DVector<f64>| {
                    for (i, x) in values.iter().enumerate() {
                        signal[start + i] = *x;
                        support.push(start + i);
                    }
                };
                place(topic_start(topic), &topic_maps[topic] * &z * spec.disjointness);
                place(verb_start(v), &verb_map * &z * (1.0 - spec.disjointness));
                if spec.background_words > 0 {
                    place(background_start, &background_map * &z * spec.background_weight);
                }
                let mean = support.iter().map(|&i| signal[i]).sum::<f64>() / support.len() as f64;
                let mut weights = signal;
                for &i in &support {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    weights[i] = (weights[i] + spec.noise * mean * eps).max(0.0);
                }

                for _ in 0..spec.phrase_occurrences {
                    let ctx = sample_words(&weights, &context_words, 2 * PHRASE_SIDE, &mut rng)?;
                    let mut sentence = Vec::with_capacity(2 * PHRASE_SIDE + 3);
                    sentence.extend_from_slice(&ctx[..PHRASE_SIDE]);
                    sentence.push(verb_key.clone());
                    sentence.push(article.clone());
                    sentence.push(WordKey::noun(&object));
                    sentence.extend_from_slice(&ctx[PHRASE_SIDE..]);
                    phrase_sentences.push((sentences.len(), object.clone()));
                    sentences.push(sentence);
                }
                let noun_weights: Vec<f64> = (&noun_map * &z).iter().copied().collect();
                for _ in 0..spec.noun_sentences {
                    let ctx = sample_words(&noun_weights, &noun_context, 2 * NOUN_SIDE, &mut rng)?;
                    let mut sentence = Vec::with_capacity(2 * NOUN_SIDE + 1);
                    sentence.extend_from_slice(&ctx[..NOUN_SIDE]);
                    sentence.push(WordKey::noun(&object));
                    sentence.extend_from_slice(&ctx[NOUN_SIDE..]);
                    sentences.push(sentence);
                }

                let key = PhraseKey::new(&verb, &object);
                phrase_weights.insert(key.to_string(), weights);
                latent.insert(object.clone(), z.iter().copied().collect());
                if j < spec.objects_per_sense {
                    planted.training.push(object);
                } else {
                    heldout_phrases.push((key, v, topic));
                    planted.heldout.push(object);
                }
            }
            senses.push(planted);
        }
        verbs.push(PlantedVerb { verb, senses });
    }

    // Shuffle sentence order so the corpus is not grouped by phrase.
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    order.shuffle(&mut rng);
    let mut new_index = vec![0; sentences.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let shuffled: Vec<Sentence> = order.iter().map(|&i| sentences[i].clone()).collect();
    let mut relations: Vec<RelationOccurrence> = phrase_sentences
        .iter()
        .map(|(old, object)| {
            let sentence = &sentences[*old];
            RelationOccurrence {
                verb: sentence[PHRASE_SIDE].lemma.clone(),
                object: object.clone(),
                sentence_index: new_index[*old],
                verb_position: PHRASE_SIDE,
                object_position: PHRASE_SIDE + 2,
            }
        })
        .collect();
    relations.sort_by_key(|r| r.sentence_index);

    let supervised = if spec.senses_per_verb == 2 {
        verbs
            .iter()
            .map(|v| SenseAnnotatedDataset {
                verb: v.verb.clone(),
                sense_1: v.senses[0].training.clone(),
                sense_2: v.senses[1].training.clone(),
            })
            .collect()
    } else {
        Vec::new()
    };

    let truth = GroundTruth {
        spec: spec.clone(),
        verbs,
        context_words: context_words.iter().map(|w| w.to_string()).collect(),
        latent,
        phrase_weights,
    };
    let similarity = similarity_pairs(&heldout_phrases, spec.similarity_pairs, &truth, &mut rng)?;

    Ok(SyntheticData {
        corpus: Corpus::new(shuffled),
        relations,
        stoplist: ["the"].into_iter().map(String::from).collect(),
        supervised,
        similarity,
        truth,
    })
}

/// Pairs of held-out phrases in three equal groups: same verb and sense,
/// same verb with another sense, and different verbs whose senses share a
/// topic. Each pair is scored by the cosine of the planted context
/// distributions. A group short of candidates cedes its share to the others.
fn similarity_pairs(
    phrases: &[(PhraseKey, usize, usize)],
    count: usize,
    truth: &GroundTruth,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<PhraseSimEntry>> {
    let mut groups: [Vec<(usize, usize)>; 3] = Default::default();
    for i in 0..phrases.len() {
        for j in (i + 1)..phrases.len() {
            let (_, vi, ti) = phrases[i];
            let (_, vj, tj) = phrases[j];
            let g = match (vi == vj, ti == tj) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => continue,
            };
            groups[g].push((i, j));
        }
    }
    let available: usize = groups.iter().map(Vec::len).sum();
    if count > available {
        return Err(Error::Infeasible(format!(
            "{count} similarity pairs requested but only {available} held-out pairs qualify"
        )));
    }
    let mut chosen = Vec::with_capacity(count);
    let mut remaining = count;
    let mut sizes: Vec<(usize, usize)> = groups.iter().map(Vec::len).enumerate().collect();
    sizes.sort_by_key(|&(g, n)| (n, g));
    for (slot, &(g, n)) in sizes.iter().enumerate() {
        let share = remaining.div_ceil(sizes.len() - slot).min(n);
        chosen.extend(groups[g].choose_multiple(rng, share).copied());
        remaining -= share;
    }
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (&phrases[i].0, &phrases[j].0);
            PhraseSimEntry {
                first: a.clone(),
                second: b.clone(),
                score: truth.planted_similarity(a, b).expect("planted phrase"),
            }
        })
        .collect())
}
