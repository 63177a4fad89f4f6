use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::holistic::PhraseKey;
use crate::linalg::fmt_f64;

/// Objects of an ambiguous verb, annotated with one of two senses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseAnnotatedDataset {
    pub verb: String,
    pub sense_1: Vec<String>,
    pub sense_2: Vec<String>,
}

impl SenseAnnotatedDataset {
    pub fn sets(&self) -> [&[String]; 2] {
        [&self.sense_1, &self.sense_2]
    }

    pub fn phrase_count(&self) -> usize {
        self.sense_1.len() + self.sense_2.len()
    }

    /// Annotated sense (0 or 1) of an object.
    pub fn sense_of(&self, object: &str) -> Option<usize> {
        if self.sense_1.iter().any(|o| o == object) {
            Some(0)
        } else if self.sense_2.iter().any(|o| o == object) {
            Some(1)
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a: BTreeSet<&String> = self.sense_1.iter().collect();
        if let Some(shared) = self.sense_2.iter().find(|o| a.contains(o)) {
            return Err(Error::InvalidArgument(format!(
                "object `{shared}` is annotated with both senses of `{}`",
                self.verb
            )));
        }
        Ok(())
    }
}

/// Reads `verb<TAB>sense_id(1|2)<TAB>object`, grouping by verb in order of
/// first appearance.
pub fn read_sense_annotated<R: BufRead>(reader: R) -> Result<Vec<SenseAnnotatedDataset>> {
    let mut out: Vec<SenseAnnotatedDataset> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::format(i + 1, "expected verb<TAB>sense_id<TAB>object"));
        }
        let slot = *index.entry(f[0].to_string()).or_insert_with(|| {
            out.push(SenseAnnotatedDataset {
                verb: f[0].to_string(),
                sense_1: Vec::new(),
                sense_2: Vec::new(),
            });
            out.len() - 1
        });
        let ds = &mut out[slot];
        let list = match f[1].trim() {
            "1" => &mut ds.sense_1,
            "2" => &mut ds.sense_2,
            other => return Err(Error::format(i + 1, format!("sense id must be 1 or 2, got `{other}`"))),
        };
        if list.iter().any(|o| o == f[2]) {
            return Err(Error::format(i + 1, format!("duplicate object `{}`", f[2])));
        }
        list.push(f[2].to_string());
    }
    for ds in &out {
        ds.validate()?;
    }
    Ok(out)
}

pub fn write_sense_annotated(data: &[SenseAnnotatedDataset], out: &mut impl Write) -> std::io::Result<()> {
    for ds in data {
        for (sense, set) in ds.sets().iter().enumerate() {
            for o in set.iter() {
                writeln!(out, "{}\t{}\t{}", ds.verb, sense + 1, o)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhraseSimEntry {
    pub first: PhraseKey,
    pub second: PhraseKey,
    pub score: f64,
}

/// Reads `verb1<TAB>obj1<TAB>verb2<TAB>obj2<TAB>score`.
pub fn read_phrase_sim<R: BufRead>(reader: R) -> Result<Vec<PhraseSimEntry>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 || f[..4].iter().any(|s| s.is_empty()) {
            return Err(Error::format(
                i + 1,
                "expected verb1<TAB>obj1<TAB>verb2<TAB>obj2<TAB>score",
            ));
        }
        let score = f[4]
            .trim()
            .parse()
            .map_err(|_| Error::format(i + 1, format!("bad score `{}`", f[4])))?;
        out.push(PhraseSimEntry {
            first: PhraseKey::new(f[0], f[1]),
            second: PhraseKey::new(f[2], f[3]),
            score,
        });
    }
    Ok(out)
}

pub fn write_phrase_sim(data: &[PhraseSimEntry], out: &mut impl Write) -> std::io::Result<()> {
    for e in data {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.first.verb,
            e.first.object,
            e.second.verb,
            e.second.object,
            fmt_f64(e.score)
        )?;
    }
    Ok(())
}
