//! Pre-tokenized corpus input: one sentence per line, `lemma|POS` tokens.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    // Declared in lexicographic order of the tag letters so the derived
    // ordering matches string comparison.
    J,
    N,
    O,
    R,
    V,
}

impl Pos {
    pub fn is_content(self) -> bool {
        !matches!(self, Pos::O)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::N => "N",
            Pos::V => "V",
            Pos::J => "J",
            Pos::R => "R",
            Pos::O => "O",
        }
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(Pos::N),
            "V" => Ok(Pos::V),
            "J" => Ok(Pos::J),
            "R" => Ok(Pos::R),
            "O" => Ok(Pos::O),
            other => Err(format!("unknown POS tag `{other}`")),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A word type: lemma plus coarse tag. Ordered by (lemma, pos).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordKey {
    pub lemma: String,
    pub pos: Pos,
}

impl WordKey {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Self {
        WordKey {
            lemma: lemma.into(),
            pos,
        }
    }

    pub fn noun(lemma: impl Into<String>) -> Self {
        Self::new(lemma, Pos::N)
    }

    pub fn verb(lemma: impl Into<String>) -> Self {
        Self::new(lemma, Pos::V)
    }
}

impl fmt::Display for WordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.lemma, self.pos)
    }
}

impl FromStr for WordKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lemma, pos) = s
            .rsplit_once('|')
            .ok_or_else(|| format!("token `{s}` is not of the form lemma|POS"))?;
        if lemma.is_empty() {
            return Err(format!("token `{s}` has an empty lemma"));
        }
        Ok(WordKey::new(lemma, pos.parse()?))
    }
}

/// A corpus token. Identical to a word key; kept as an alias for readability.
pub type Token = WordKey;

pub type Sentence = Vec<Token>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Corpus { sentences }
    }

    /// Parses the line-per-sentence format. Blank lines are kept as empty
    /// sentences so that sentence indices match file line numbers (0-based).
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut sentences = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let sentence = line
                .split_whitespace()
                .map(|tok| tok.parse::<Token>().map_err(|m| Error::format(i + 1, m)))
                .collect::<Result<Vec<_>>>()?;
            sentences.push(sentence);
        }
        Ok(Corpus { sentences })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.token_count() == 0
    }

    pub fn write_to(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        for sentence in &self.sentences {
            let mut first = true;
            for tok in sentence {
                if !first {
                    out.write_all(b" ")?;
                }
                first = false;
                write!(out, "{tok}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Lemmas excluded from the basis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopList(pub HashSet<String>);

impl StopList {
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut set = HashSet::new();
        for line in reader.lines() {
            let line = line?;
            let lemma = line.trim();
            if !lemma.is_empty() {
                set.insert(lemma.to_string());
            }
        }
        Ok(StopList(set))
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.0.contains(lemma)
    }
}

impl<S: Into<String>> FromIterator<S> for StopList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopList(iter.into_iter().map(Into::into).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tokens_and_reports_line_numbers() {
        let corpus = Corpus::parse("kid|N play|V game|N\n\nthe|O ball|N\n").unwrap();
        assert_eq!(corpus.sentences.len(), 3);
        assert_eq!(corpus.sentences[0][1], WordKey::verb("play"));
        assert!(corpus.sentences[1].is_empty());

        let err = Corpus::parse("kid|N\nbad|X\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }), "{err}");
        let err = Corpus::parse("nopos\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
        assert!(Corpus::parse("|N\n").is_err());
    }

    #[test]
    fn write_round_trips() {
        let text = "a|N b|V\nc|J\n";
        let corpus = Corpus::parse(text).unwrap();
        let mut out = Vec::new();
        corpus.write_to(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn content_tags() {
        assert!(Pos::N.is_content() && Pos::V.is_content() && Pos::J.is_content());
        assert!(Pos::R.is_content());
        assert!(!Pos::O.is_content());
    }
}
