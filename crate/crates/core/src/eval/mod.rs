//! The two evaluation protocols: cross-validated ranking against holistic
//! vectors, and correlation with human phrase-similarity scores.

mod crossval;
mod datasets;
mod metrics;
mod similarity;
mod supervised;

pub use crossval::{crossval_folds, Fold};
pub use datasets::{
    read_phrase_sim, read_sense_annotated, write_phrase_sim, write_sense_annotated, PhraseSimEntry,
    SenseAnnotatedDataset,
};
pub use metrics::{accuracy, avg_cosine, mrr, rank_from_scores, rank_of_correct};
pub use similarity::{run_similarity_task, ModelComparison, ModelCorrelation, SimilarityReport, SimilaritySettings};
pub use supervised::{
    run_supervised_task, Contrast, FoldReport, Metrics, PhraseOutcome, SupervisedReport, SupervisedSettings, VerbReport,
};

pub use crate::stats::{paired_significance, spearman_rho};

/// Leading `#config <hash>` line of a report table, empty without a hash.
fn config_line(hash: &Option<String>) -> String {
    hash.as_ref().map_or_else(String::new, |h| format!("#config {h}\n"))
}
