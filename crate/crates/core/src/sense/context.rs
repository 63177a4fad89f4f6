use nalgebra::DVector;

use crate::corpus::Token;
use crate::corpus_space::SemanticSpace;

/// Average of the word vectors around one verb occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector {
    pub vector: DVector<f64>,
    /// Number of sentence tokens found in the space.
    pub contributors: usize,
}

/// Mean of the space vectors of every token except the one at
/// `target_position`. Tokens absent from the space are skipped; `None` when
/// nothing contributes (the occurrence is dropped by callers).
///
/// # Panics
/// If `target_position` is outside the sentence.
pub fn context_vector(sentence: &[Token], target_position: usize, space: &SemanticSpace) -> Option<ContextVector> {
    assert!(target_position < sentence.len(), "target position outside sentence");
    let mut sum = DVector::zeros(space.dim());
    let mut contributors = 0;
    for (i, tok) in sentence.iter().enumerate() {
        if i == target_position {
            continue;
        }
        if let Some(row) = space.index_of(tok) {
            sum += space.matrix().row(row).transpose();
            contributors += 1;
        }
    }
    (contributors > 0).then(|| ContextVector {
        vector: sum / contributors as f64,
        contributors,
    })
}
