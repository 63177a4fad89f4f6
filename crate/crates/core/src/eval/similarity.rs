use serde::{Deserialize, Serialize};

use crate::composition::{CompositionModel, ModelKind};
use crate::error::{Error, Result};
use crate::stats::{average_ranks, paired_significance, spearman_rho};

use super::config_line;
use super::metrics::mean;
use super::PhraseSimEntry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySettings {
    pub seed: u64,
    pub permutations: usize,
    /// Inter-annotator agreement, reported alongside the models as given.
    pub human_agreement: Option<f64>,
}

impl Default for SimilaritySettings {
    fn default() -> Self {
        SimilaritySettings {
            seed: 0,
            permutations: crate::stats::DEFAULT_PERMUTATIONS,
            human_agreement: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCorrelation {
    pub model: ModelKind,
    pub spearman_rho: f64,
    pub scored: usize,
    /// Dataset rows skipped because the holistic lookup had no vector.
    pub excluded: Vec<usize>,
    /// Scored rows where a composite was the zero vector (cosine taken as 0).
    pub zero_vectors: usize,
    /// Cosine per dataset row; `None` for excluded rows.
    pub cosines: Vec<Option<f64>>,
}

/// Paired test between two models over the rows both could score. The
/// per-row statistic is the squared difference between the model's rank
/// of the row and the gold rank, whose mean is an affine function of
/// Spearman's ρ when there are no ties. The test is two-sided; the mean
/// errors tell which model ranks closer to the gold scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub first: ModelKind,
    pub second: ModelKind,
    pub rows: usize,
    pub first_mean_error: f64,
    pub second_mean_error: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub config_hash: Option<String>,
    pub settings: SimilaritySettings,
    pub entries: usize,
    pub models: Vec<ModelCorrelation>,
    pub comparisons: Vec<ModelComparison>,
}

impl SimilarityReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelCorrelation> {
        self.models.iter().find(|m| m.model == kind)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Spearman ρ per model, followed by human agreement when known.
    pub fn table_tsv(&self) -> String {
        let mut out = config_line(&self.config_hash);
        out.push_str("model\tspearman_rho\tscored\texcluded\n");
        for m in &self.models {
            out.push_str(&format!(
                "{}\t{:.4}\t{}\t{}\n",
                m.model,
                m.spearman_rho,
                m.scored,
                m.excluded.len()
            ));
        }
        if let Some(h) = self.settings.human_agreement {
            out.push_str(&format!("human_agreement\t{h:.4}\t{}\t0\n", self.entries));
        }
        out
    }
}

fn correlate(dataset: &[PhraseSimEntry], model: &CompositionModel<'_>) -> Result<ModelCorrelation> {
    let mut cosines = Vec::with_capacity(dataset.len());
    let mut excluded = Vec::new();
    let mut zero_vectors = 0;
    for (i, e) in dataset.iter().enumerate() {
        match model.pair_similarity((&e.first.verb, &e.first.object), (&e.second.verb, &e.second.object)) {
            Ok(s) => {
                zero_vectors += usize::from(s.zero_vector);
                cosines.push(Some(s.cosine));
            }
            Err(Error::HolisticMiss { verb, object }) => {
                log::warn!(
                    "{}: no holistic vector for `{verb} {object}`, row {} excluded",
                    model.kind,
                    i + 1
                );
                excluded.push(i);
                cosines.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let (model_scores, gold): (Vec<f64>, Vec<f64>) = cosines
        .iter()
        .zip(dataset)
        .filter_map(|(c, e)| c.map(|c| (c, e.score)))
        .unzip();
    if model_scores.len() < 2 {
        return Err(Error::TooFewPairs {
            found: model_scores.len(),
            required: 2,
        });
    }
    Ok(ModelCorrelation {
        model: model.kind,
        spearman_rho: spearman_rho(&model_scores, &gold)?,
        scored: model_scores.len(),
        excluded,
        zero_vectors,
        cosines,
    })
}

/// Squared rank errors against the gold ranking for `a` and `b`, over the
/// rows both scored.
fn rank_errors(dataset: &[PhraseSimEntry], a: &ModelCorrelation, b: &ModelCorrelation) -> (Vec<f64>, Vec<f64>) {
    let rows: Vec<(f64, f64, f64)> = a
        .cosines
        .iter()
        .zip(&b.cosines)
        .zip(dataset)
        .filter_map(|((x, y), e)| Some(((*x)?, (*y)?, e.score)))
        .collect();
    let gold = average_ranks(&rows.iter().map(|r| r.2).collect::<Vec<_>>());
    let ranks_a = average_ranks(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let ranks_b = average_ranks(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
    let err = |ranks: &[f64]| ranks.iter().zip(&gold).map(|(r, g)| (r - g).powi(2)).collect();
    (err(&ranks_a), err(&ranks_b))
}

/// Spearman ρ of each model's pair cosines against the human scores.
/// Holistic-lookup misses drop the row for that model only. When the
/// disambiguated model is present it is compared with the ambiguous and
/// holistic models by a paired permutation test.
pub fn run_similarity_task(
    dataset: &[PhraseSimEntry],
    models: &[CompositionModel<'_>],
    settings: &SimilaritySettings,
) -> Result<SimilarityReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("phrase similarity dataset"));
    }
    let correlations: Vec<ModelCorrelation> = models.iter().map(|m| correlate(dataset, m)).collect::<Result<_>>()?;
    let find = |k: ModelKind| correlations.iter().find(|c| c.model == k);
    let mut comparisons = Vec::new();
    if let Some(dis) = find(ModelKind::DisambiguatedMatrix) {
        for other in [ModelKind::AmbiguousMatrix, ModelKind::HolisticLookup] {
            let Some(other) = find(other) else {
                continue;
            };
            let (ed, eo) = rank_errors(dataset, dis, other);
            let p_value = match paired_significance(&ed, &eo, settings.permutations, settings.seed) {
                Ok(p) => p,
                Err(Error::TooFewPairs { .. }) => continue,
                Err(e) => return Err(e),
            };
            comparisons.push(ModelComparison {
                first: dis.model,
                second: other.model,
                rows: ed.len(),
                first_mean_error: mean(&ed),
                second_mean_error: mean(&eo),
                p_value,
            });
        }
    }
    Ok(SimilarityReport {
        config_hash: None,
        settings: settings.clone(),
        entries: dataset.len(),
        models: correlations,
        comparisons,
    })
}
