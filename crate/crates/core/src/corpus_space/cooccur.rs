use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::corpus::{Corpus, Sentence};

use super::Vocabulary;

/// Sparse raw counts, rows indexed by target id and columns by basis id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    cols: usize,
    rows: Vec<BTreeMap<usize, u64>>,
}

impl CooccurrenceMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CooccurrenceMatrix {
            cols,
            rows: vec![BTreeMap::new(); rows],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.rows[row].get(&col).copied().unwrap_or(0)
    }

    pub fn add(&mut self, row: usize, col: usize, count: u64) {
        debug_assert!(col < self.cols);
        if count > 0 {
            *self.rows[row].entry(col).or_insert(0) += count;
        }
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.rows[row].iter().map(|(&c, &n)| (c, n))
    }

    /// Cell-wise sum. Integer addition, so the merge order is irrelevant.
    pub fn merge(mut self, other: &CooccurrenceMatrix) -> Self {
        assert_eq!(self.nrows(), other.nrows());
        assert_eq!(self.cols, other.cols);
        for (r, row) in other.rows.iter().enumerate() {
            for (&c, &n) in row {
                self.add(r, c, n);
            }
        }
        self
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.values().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.cols];
        for row in &self.rows {
            for (&c, &n) in row {
                sums[c] += n;
            }
        }
        sums
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().flat_map(|r| r.values()).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, &n) in row {
                m[(r, c)] = n as f64;
            }
        }
        m
    }
}

fn count_sentence(sentence: &Sentence, vocab: &Vocabulary, window: usize, out: &mut CooccurrenceMatrix) {
    let basis_ids: Vec<Option<usize>> = sentence.iter().map(|t| vocab.basis_id(t)).collect();
    for (i, tok) in sentence.iter().enumerate() {
        let Some(t) = vocab.target_id(tok) else {
            continue;
        };
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(sentence.len().saturating_sub(1));
        for (j, id) in basis_ids.iter().enumerate().take(hi + 1).skip(lo) {
            if j == i {
                continue;
            }
            if let Some(c) = *id {
                out.add(t, c, 1);
            }
        }
    }
}

/// Counts basis words within `window` tokens of each target occurrence,
/// never crossing a sentence boundary.
pub fn count_cooccurrences(corpus: &Corpus, vocab: &Vocabulary, window: usize) -> CooccurrenceMatrix {
    let rows = vocab.targets().len();
    let cols = vocab.basis().len();
    corpus
        .sentences
        .par_chunks(4096)
        .map(|chunk| {
            let mut partial = CooccurrenceMatrix::zeros(rows, cols);
            for s in chunk {
                count_sentence(s, vocab, window, &mut partial);
            }
            partial
        })
        .reduce(|| CooccurrenceMatrix::zeros(rows, cols), |a, b| a.merge(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::WordKey;

    fn ab_vocab() -> Vocabulary {
        let ab = vec![WordKey::noun("a"), WordKey::noun("b")];
        Vocabulary::new(ab.clone(), ab).unwrap()
    }

    #[test]
    fn single_token_has_no_context() {
        let corpus = Corpus::parse("a|N\n").unwrap();
        let m = count_cooccurrences(&corpus, &ab_vocab(), 5);
        assert_eq!(m.total(), 0);
    }

    #[test]
    fn a_b_a_window_one() {
        let corpus = Corpus::parse("a|N b|N a|N\n").unwrap();
        let m = count_cooccurrences(&corpus, &ab_vocab(), 1);
        assert_eq!(m.get(0, 1), 2);
        assert_eq!(m.get(1, 0), 2);
        assert_eq!(m.get(0, 0), 0);
        assert_eq!(m.get(1, 1), 0);
    }

    #[test]
    fn window_does_not_cross_sentences() {
        let corpus = Corpus::parse("a|N\nb|N\n").unwrap();
        let m = count_cooccurrences(&corpus, &ab_vocab(), 5);
        assert_eq!(m.total(), 0);
    }

    #[test]
    fn merge_adds_cells() {
        let mut a = CooccurrenceMatrix::zeros(2, 2);
        a.add(0, 1, 3);
        let mut b = CooccurrenceMatrix::zeros(2, 2);
        b.add(0, 1, 2);
        b.add(1, 0, 1);
        let m = a.merge(&b);
        assert_eq!(m.get(0, 1), 5);
        assert_eq!(m.get(1, 0), 1);
        assert_eq!(m.row_sums(), vec![5, 1]);
        assert_eq!(m.col_sums(), vec![1, 5]);
    }
}
