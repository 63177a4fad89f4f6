use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::corpus_space::SemanticSpace;
use crate::error::{Error, Result};
use crate::holistic::RelationOccurrence;
use crate::linalg::cosine_vec;

use super::{context_vector, hac_cluster, select_partition, ClusterConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sense {
    pub id: usize,
    /// Number of exemplar objects.
    pub size: usize,
    pub centroid: Vec<f64>,
    /// Exemplar objects, sorted.
    pub objects: Vec<String>,
}

impl Sense {
    pub fn centroid_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.centroid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseInventory {
    pub verb: String,
    pub senses: Vec<Sense>,
    pub dominant: usize,
    pub config_hash: Option<String>,
}

impl SenseInventory {
    pub fn sense(&self, id: usize) -> Option<&Sense> {
        self.senses.iter().find(|s| s.id == id)
    }

    pub fn sense_of_object(&self, object: &str) -> Option<usize> {
        self.senses
            .iter()
            .find(|s| s.objects.binary_search_by(|o| o.as_str().cmp(object)).is_ok())
            .map(|s| s.id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Largest exemplar count wins; ties go to the lowest id.
fn dominant_of(counts: &[(usize, usize)]) -> usize {
    let mut best = counts[0];
    for &(id, c) in &counts[1..] {
        if c > best.1 {
            best = (id, c);
        }
    }
    best.0
}

/// Sense whose centroid has the highest cosine with the object vector;
/// ties go to the lowest id. A zero object vector falls back to the
/// dominant sense.
pub fn assign_object(object_vector: &DVector<f64>, inventory: &SenseInventory) -> usize {
    if inventory.senses.len() == 1 {
        return inventory.senses[0].id;
    }
    if object_vector.iter().all(|&x| x == 0.0) {
        log::warn!(
            "zero object vector for verb `{}`; using the dominant sense",
            inventory.verb
        );
        return inventory.dominant;
    }
    let mut best: Option<(usize, f64)> = None;
    for s in &inventory.senses {
        let Some(c) = cosine_vec(object_vector, &s.centroid_vector()) else {
            continue;
        };
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((s.id, c));
        }
    }
    best.map_or(inventory.dominant, |(id, _)| id)
}

/// Induces the senses of `verb` from its occurrences.
///
/// Each usable occurrence contributes a context vector; these are clustered
/// and cut at the best variance ratio. Every object goes to the cluster
/// holding most of its occurrences (ties to the cluster with more
/// occurrences overall, then the lower label). Clusters with fewer than
/// `min_exemplars` objects are folded into the dominant one, and centroids
/// are recomputed over the merged occurrences.
pub fn build_sense_inventory(
    verb: &str,
    occurrences: &[RelationOccurrence],
    corpus: &Corpus,
    space: &SemanticSpace,
    cfg: &ClusterConfig,
) -> Result<SenseInventory> {
    cfg.validate()?;
    let mut vectors = Vec::new();
    let mut objects = Vec::new();
    for occ in occurrences.iter().filter(|o| o.verb == verb) {
        let sentence = corpus
            .sentences
            .get(occ.sentence_index)
            .filter(|s| occ.verb_position < s.len())
            .ok_or_else(|| Error::InvalidArgument(format!("occurrence {occ:?} is outside the corpus")))?;
        match context_vector(sentence, occ.verb_position, space) {
            Some(cv) => {
                vectors.push(cv.vector);
                objects.push(occ.object.as_str());
            }
            None => log::warn!(
                "dropping occurrence of `{verb}` in sentence {}: no context word in the space",
                occ.sentence_index
            ),
        }
    }
    if vectors.is_empty() {
        return Err(Error::NoUsableOccurrences(verb.to_string()));
    }

    let dendrogram = hac_cluster(&vectors, cfg);
    let partition = select_partition(&dendrogram, &vectors, cfg)?;
    let k = partition.k;

    let mut cluster_sizes = vec![0usize; k];
    for &l in &partition.labels {
        cluster_sizes[l] += 1;
    }
    let mut per_object: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (&obj, &l) in objects.iter().zip(&partition.labels) {
        per_object.entry(obj).or_insert_with(|| vec![0; k])[l] += 1;
    }
    let mut cluster_objects: Vec<Vec<String>> = vec![Vec::new(); k];
    for (obj, votes) in &per_object {
        let mut best = 0;
        for c in 1..k {
            if (votes[c], cluster_sizes[c]) > (votes[best], cluster_sizes[best]) {
                best = c;
            }
        }
        cluster_objects[best].push(obj.to_string());
    }

    let counts: Vec<(usize, usize)> = cluster_objects.iter().map(Vec::len).enumerate().collect();
    let dominant_cluster = dominant_of(&counts);
    // cluster -> surviving cluster
    let target: Vec<usize> = (0..k)
        .map(|c| {
            if c != dominant_cluster && cluster_objects[c].len() < cfg.min_exemplars {
                dominant_cluster
            } else {
                c
            }
        })
        .collect();
    let dominant_small = cluster_objects[dominant_cluster].len() < cfg.min_exemplars;
    let target: Vec<usize> = if dominant_small {
        vec![dominant_cluster; k]
    } else {
        target
    };

    let survivors: Vec<usize> = (0..k).filter(|&c| target[c] == c).collect();
    let mut senses = Vec::with_capacity(survivors.len());
    for (id, &c) in survivors.iter().enumerate() {
        let mut objs: Vec<String> = (0..k)
            .filter(|&o| target[o] == c)
            .flat_map(|o| cluster_objects[o].iter().cloned())
            .collect();
        objs.sort();
        let mut sum = DVector::zeros(space.dim());
        let mut members = 0;
        for (v, &l) in vectors.iter().zip(&partition.labels) {
            if target[l] == c {
                sum += v;
                members += 1;
            }
        }
        senses.push(Sense {
            id,
            size: objs.len(),
            centroid: (sum / members as f64).iter().copied().collect(),
            objects: objs,
        });
    }
    let counts: Vec<(usize, usize)> = senses.iter().map(|s| (s.id, s.size)).collect();
    Ok(SenseInventory {
        verb: verb.to_string(),
        dominant: dominant_of(&counts),
        senses,
        config_hash: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inventory(centroids: &[&[f64]], sizes: &[usize]) -> SenseInventory {
        let senses = centroids
            .iter()
            .zip(sizes)
            .enumerate()
            .map(|(id, (c, &size))| Sense {
                id,
                size,
                centroid: c.to_vec(),
                objects: (0..size).map(|i| format!("o{id}_{i}")).collect(),
            })
            .collect::<Vec<_>>();
        let counts: Vec<_> = senses.iter().map(|s| (s.id, s.size)).collect();
        SenseInventory {
            verb: "v".into(),
            dominant: dominant_of(&counts),
            senses,
            config_hash: None,
        }
    }

    #[test]
    fn object_at_centroid() {
        let inv = inventory(&[&[1.0, 0.0], &[0.0, 1.0]], &[3, 4]);
        assert_eq!(assign_object(&DVector::from_vec(vec![0.0, 2.0]), &inv), 1);
    }

    #[test]
    fn ten_degrees_from_a() {
        let inv = inventory(&[&[1.0, 0.0], &[0.0, 1.0]], &[3, 4]);
        let t = 10f64.to_radians();
        let obj = DVector::from_vec(vec![t.cos(), t.sin()]);
        // cos 10° ≈ 0.985 vs cos 80° ≈ 0.174
        assert_eq!(assign_object(&obj, &inv), 0);
    }

    #[test]
    fn single_sense_and_zero_vector() {
        let inv = inventory(&[&[1.0, 0.0]], &[5]);
        assert_eq!(assign_object(&DVector::from_vec(vec![-1.0, 0.0]), &inv), 0);
        let inv = inventory(&[&[1.0, 0.0], &[0.0, 1.0]], &[3, 4]);
        assert_eq!(inv.dominant, 1);
        assert_eq!(assign_object(&DVector::zeros(2), &inv), 1);
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let inv = inventory(&[&[1.0, 0.0], &[0.0, 1.0]], &[3, 3]);
        assert_eq!(inv.dominant, 0);
        assert_eq!(assign_object(&DVector::from_vec(vec![1.0, 1.0]), &inv), 0);
    }

    #[test]
    fn json_shape() {
        let inv = inventory(&[&[0.5, 0.25]], &[1]);
        let json = inv.to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["verb"], "v");
        assert_eq!(value["dominant"], 0);
        assert_eq!(value["senses"][0]["size"], 1);
        assert_eq!(value["senses"][0]["centroid"][1], 0.25);
        assert_eq!(value["senses"][0]["objects"][0], "o0_0");
        assert!(value["config_hash"].is_null());
        assert_eq!(SenseInventory::from_json(&json).unwrap(), inv);
    }
}
