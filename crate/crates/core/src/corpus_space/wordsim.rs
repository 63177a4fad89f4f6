use std::io::BufRead;

use crate::corpus::{Pos, WordKey};
use crate::error::{Error, Result};
use crate::linalg::cosine_vec;
use crate::stats::{pearson, spearman_rho};

use super::SemanticSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct WordSimPair {
    pub first: String,
    pub second: String,
    pub score: f64,
}

/// Reads `word1<TAB>word2<TAB>score` lines.
pub fn read_wordsim<R: BufRead>(reader: R) -> Result<Vec<WordSimPair>> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::format(i + 1, "expected word1<TAB>word2<TAB>score"));
        }
        let score = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::format(i + 1, format!("bad score `{}`", fields[2])))?;
        pairs.push(WordSimPair {
            first: fields[0].trim().to_string(),
            second: fields[1].trim().to_string(),
            score,
        });
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordSimResult {
    pub spearman: f64,
    pub pearson: f64,
    pub scored: usize,
    pub skipped: usize,
}

/// Resolves `lemma|POS` exactly; a bare lemma prefers the noun reading, then
/// the first tagged reading in space order.
pub fn lookup_word(space: &SemanticSpace, word: &str) -> Option<usize> {
    if let Ok(key) = word.parse::<WordKey>() {
        return space.index_of(&key);
    }
    if let Some(i) = space.index_of(&WordKey::new(word, Pos::N)) {
        return Some(i);
    }
    space.keys().iter().position(|k| k.lemma == word)
}

/// Correlates cosine similarities with human scores, skipping pairs with a
/// word missing from the space.
pub fn evaluate_wordsim(space: &SemanticSpace, pairs: &[WordSimPair]) -> Result<WordSimResult> {
    let mut model = Vec::new();
    let mut human = Vec::new();
    let mut skipped = 0;
    for p in pairs {
        let (Some(a), Some(b)) = (lookup_word(space, &p.first), lookup_word(space, &p.second)) else {
            skipped += 1;
            continue;
        };
        model.push(cosine_vec(&space.row(a), &space.row(b)).unwrap_or(0.0));
        human.push(p.score);
    }
    if model.len() < 2 {
        return Err(Error::TooFewPairs {
            found: model.len(),
            required: 2,
        });
    }
    Ok(WordSimResult {
        spearman: spearman_rho(&model, &human)?,
        pearson: pearson(&model, &human)?,
        scored: model.len(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors::Provenance;
    use nalgebra::DMatrix;

    fn toy_space() -> SemanticSpace {
        let keys = ["a", "b", "c", "d"].map(WordKey::noun).to_vec();
        // angles 0, 30, 60, 90 degrees from a
        let m = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.866, 0.5, 0.5, 0.866, 0.0, 1.0]);
        SemanticSpace::new(keys, m, Provenance::default()).unwrap()
    }

    #[test]
    fn identical_ranking_is_perfect() {
        let space = toy_space();
        let pairs = read_wordsim("a\tb\t9\na\tc\t5\na\td\t1\nq\ta\t3\n".as_bytes()).unwrap();
        let r = evaluate_wordsim(&space, &pairs).unwrap();
        assert!((r.spearman - 1.0).abs() < 1e-12);
        assert_eq!(r.scored, 3);
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn too_few_pairs() {
        let space = toy_space();
        let pairs = read_wordsim("a\tb\t9\nx\ty\t1\n".as_bytes()).unwrap();
        assert!(matches!(
            evaluate_wordsim(&space, &pairs),
            Err(Error::TooFewPairs { found: 1, .. })
        ));
    }

    #[test]
    fn bad_lines() {
        assert!(read_wordsim("a\tb\n".as_bytes()).is_err());
        assert!(read_wordsim("a\tb\tx\n".as_bytes()).is_err());
    }
}
