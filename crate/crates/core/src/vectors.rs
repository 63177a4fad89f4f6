//! Keyed dense vector spaces and their TSV serialization.
//!
//! ```text
//! #dim <d> [#config <hash>]
//! <key>\t<v1>\t...\t<vd>
//! ```

use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fmt_f64;

/// Which processing steps produced the current vectors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub weighted: bool,
    /// Rows are currently unit length (nonzero rows only).
    pub normalized: bool,
    pub reduced_to: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct VectorSpace<K> {
    keys: Vec<K>,
    index: HashMap<K, usize>,
    vectors: DMatrix<f64>,
    pub provenance: Provenance,
    pub config_hash: Option<String>,
}

// The index is derived from the keys, so it takes no part in equality.
impl<K: PartialEq> PartialEq for VectorSpace<K> {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
            && self.vectors == other.vectors
            && self.provenance == other.provenance
            && self.config_hash == other.config_hash
    }
}

impl<K: Clone + Eq + Hash + Display> VectorSpace<K> {
    pub fn new(keys: Vec<K>, vectors: DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        if keys.len() != vectors.nrows() {
            return Err(Error::ShapeMismatch {
                context: "vector space keys",
                expected: (keys.len(), vectors.ncols()),
                found: vectors.shape(),
            });
        }
        if vectors.ncols() == 0 {
            return Err(Error::InvalidArgument("vector dimensionality must be positive".into()));
        }
        let mut index = HashMap::with_capacity(keys.len());
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate key {k}")));
            }
        }
        Ok(VectorSpace {
            keys,
            index,
            vectors,
            provenance,
            config_hash: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn index_of(&self, key: &K) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &K) -> bool {
        self.index.contains_key(key)
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.vectors.row(i).transpose()
    }

    pub fn get(&self, key: &K) -> Option<DVector<f64>> {
        self.index_of(key).map(|i| self.row(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, DVector<f64>)> + '_ {
        self.keys.iter().enumerate().map(|(i, k)| (k, self.row(i)))
    }

    pub fn with_config_hash(mut self, hash: impl Into<String>) -> Self {
        self.config_hash = Some(hash.into());
        self
    }

    pub fn write_tsv(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "#dim {}", self.dim())?;
        if let Some(h) = &self.config_hash {
            write!(out, " #config {h}")?;
        }
        writeln!(out)?;
        for (i, key) in self.keys.iter().enumerate() {
            write!(out, "{key}")?;
            for x in self.vectors.row(i).iter() {
                write!(out, "\t{}", fmt_f64(*x))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

impl<K> VectorSpace<K>
where
    K: Clone + Eq + Hash + Display + FromStr,
    K::Err: Display,
{
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::format(1, "missing #dim header"))??;
        let fields = parse_header(&header, 1)?;
        let dim: usize = header_field(&fields, "dim", 1)?
            .parse()
            .map_err(|_| Error::format(1, "bad #dim value"))?;
        let config_hash = fields.iter().find(|(k, _)| k == "config").map(|(_, v)| v.clone());

        let mut keys = Vec::new();
        let mut data = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let key_text = parts.next().unwrap_or_default();
            let key = key_text
                .parse::<K>()
                .map_err(|e| Error::format(lineno, format!("bad key `{key_text}`: {e}")))?;
            let before = data.len();
            for p in parts {
                data.push(
                    p.parse::<f64>()
                        .map_err(|_| Error::format(lineno, format!("bad float `{p}`")))?,
                );
            }
            if data.len() - before != dim {
                return Err(Error::format(
                    lineno,
                    format!("expected {dim} values, found {}", data.len() - before),
                ));
            }
            keys.push(key);
        }
        let vectors = DMatrix::from_row_slice(keys.len(), dim, &data);
        let mut space = VectorSpace::new(keys, vectors, Provenance::default())?;
        space.config_hash = config_hash;
        Ok(space)
    }
}

/// Splits a `#key value #key value` header line into pairs.
pub(crate) fn parse_header(line: &str, lineno: usize) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut tokens = line.split_whitespace();
    while let Some(tok) = tokens.next() {
        let key = tok
            .strip_prefix('#')
            .ok_or_else(|| Error::format(lineno, format!("expected #field, found `{tok}`")))?;
        let value = tokens
            .next()
            .ok_or_else(|| Error::format(lineno, format!("header field #{key} has no value")))?;
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

pub(crate) fn header_field<'a>(fields: &'a [(String, String)], key: &str, lineno: usize) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::format(lineno, format!("missing #{key} header field")))
}
