use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::cosine_vec;

/// 1-based rank of `scores[correct]` under descending order. The correct
/// item sits at the mean rank of its tie group, rounded up.
pub fn rank_from_scores(scores: &[f64], correct: usize) -> usize {
    let target = scores[correct];
    let greater = scores.iter().filter(|&&s| s > target).count();
    let tied = scores.iter().filter(|&&s| s == target).count();
    // ranks greater+1 ..= greater+tied; mean = greater + (tied+1)/2
    greater + (tied + 2) / 2
}

/// Rank of the candidate keyed `correct` by cosine to `holistic`. A zero
/// vector on either side scores 0.
pub fn rank_of_correct<K: PartialEq + std::fmt::Display>(
    holistic: &DVector<f64>,
    candidates: &[(K, DVector<f64>)],
    correct: &K,
) -> Result<usize> {
    let idx = candidates
        .iter()
        .position(|(k, _)| k == correct)
        .ok_or_else(|| Error::MissingResource {
            kind: "candidate",
            name: correct.to_string(),
        })?;
    let scores: Vec<f64> = candidates
        .iter()
        .map(|(_, v)| cosine_vec(holistic, v).unwrap_or(0.0))
        .collect();
    Ok(rank_from_scores(&scores, idx))
}

fn check_ranks(ranks: &[usize]) -> Result<()> {
    if ranks.is_empty() {
        return Err(Error::EmptyInput("rank list"));
    }
    if ranks.contains(&0) {
        return Err(Error::InvalidArgument("ranks are 1-based".into()));
    }
    Ok(())
}

/// Mean reciprocal rank.
pub fn mrr(ranks: &[usize]) -> Result<f64> {
    check_ranks(ranks)?;
    Ok(ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64)
}

/// Fraction of rank-1 entries.
pub fn accuracy(ranks: &[usize]) -> Result<f64> {
    check_ranks(ranks)?;
    Ok(ranks.iter().filter(|&&r| r == 1).count() as f64 / ranks.len() as f64)
}

/// Mean cosine between each holistic vector and its composite, plus the
/// per-pair cosines.
pub fn avg_cosine(pairs: &[(DVector<f64>, DVector<f64>)]) -> Result<(f64, Vec<f64>)> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("cosine pairs"));
    }
    let cosines: Vec<f64> = pairs.iter().map(|(h, c)| cosine_vec(h, c).unwrap_or(0.0)).collect();
    Ok((mean(&cosines), cosines))
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
