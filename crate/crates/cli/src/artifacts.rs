//! On-disk layout of pipeline artifacts and the config-hash checks that
//! guard loading them.
//!
//! ```text
//! <artifacts>/manifest.json
//! <artifacts>/space.tsv
//! <artifacts>/holistic.tsv
//! <artifacts>/senses/<verb>.json
//! <artifacts>/matrices/ambiguous/<verb>.tsv
//! <artifacts>/matrices/per_sense/<verb>/<sense>.tsv
//! <artifacts>/reports/{supervised,similarity}.{json,tsv}
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use verbsense::composition::VerbSenses;
use verbsense::{Error, HolisticPhraseSpace, PipelineConfig, Result, SemanticSpace, SenseInventory, VerbMatrix};

pub const MANIFEST: &str = "manifest.json";
pub const SPACE: &str = "space.tsv";
pub const HOLISTIC: &str = "holistic.tsv";

/// Escapes a verb into a single safe path component.
pub fn file_stem(verb: &str) -> String {
    let mut out = String::with_capacity(verb.len());
    for b in verb.bytes() {
        if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || (b == b'.' && !out.is_empty()) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

/// Records which command wrote each artifact under which config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: serde_json::Value,
    /// Relative artifact path to the command that produced it.
    pub artifacts: BTreeMap<String, String>,
}

pub struct Store<'a> {
    pub root: PathBuf,
    cfg: &'a PipelineConfig,
    hash: String,
    force: bool,
}

impl<'a> Store<'a> {
    pub fn new(cfg: &'a PipelineConfig, force: bool) -> Self {
        Store {
            root: cfg.paths.artifacts.clone(),
            cfg,
            hash: cfg.hash(),
            force,
        }
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn senses_rel(verb: &str) -> String {
        format!("senses/{}.json", file_stem(verb))
    }

    pub fn ambiguous_rel(verb: &str) -> String {
        format!("matrices/ambiguous/{}.tsv", file_stem(verb))
    }

    pub fn sense_matrix_rel(verb: &str, sense: usize) -> String {
        format!("matrices/per_sense/{}/{sense}.tsv", file_stem(verb))
    }

    pub fn report_rel(task: &str, ext: &str) -> String {
        format!("reports/{task}.{ext}")
    }

    /// Writes `rel` through `fill`, creating parent directories.
    pub fn write(&self, rel: &str, fill: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let path = self.path(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
        }
        let file = File::create(&path).map_err(|e| Error::from(e).in_file(&path))?;
        let mut out = BufWriter::new(file);
        fill(&mut out)
            .and_then(|()| out.flush())
            .map_err(|e| Error::from(e).in_file(&path))
    }

    /// Adds `written` to the manifest, starting a fresh one when the
    /// existing manifest belongs to another config.
    pub fn record(&self, command: &str, written: &[String]) -> Result<()> {
        let current = fs::read_to_string(self.path(MANIFEST))
            .ok()
            .and_then(|text| serde_json::from_str::<Manifest>(&text).ok())
            .filter(|m| m.config_hash == self.hash);
        let mut manifest = match current {
            Some(m) => m,
            None => Manifest {
                config_hash: self.hash.clone(),
                config: serde_json::to_value(self.cfg)?,
                artifacts: BTreeMap::new(),
            },
        };
        for rel in written {
            manifest.artifacts.insert(rel.clone(), command.to_string());
        }
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        self.write(MANIFEST, |out| out.write_all(text.as_bytes()))
    }

    fn open(&self, rel: &str) -> Result<BufReader<File>> {
        let path = self.path(rel);
        match File::open(&path) {
            Ok(f) => Ok(BufReader::new(f)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingArtifact(rel.to_string())),
            Err(e) => Err(Error::from(e).in_file(path)),
        }
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).is_file()
    }

    /// Refuses an artifact made under another config unless forced.
    fn check(&self, rel: &str, found: Option<&str>) -> Result<()> {
        if found == Some(self.hash.as_str()) {
            return Ok(());
        }
        let found = found.unwrap_or("(none)").to_string();
        if self.force {
            log::warn!("{rel} was produced by config {found}; using it anyway (--force)");
            return Ok(());
        }
        Err(Error::ConfigHashMismatch {
            artifact: rel.to_string(),
            expected: self.hash.clone(),
            found,
        })
    }

    pub fn load_space(&self) -> Result<SemanticSpace> {
        let space = SemanticSpace::read_tsv(self.open(SPACE)?).map_err(|e| e.in_file(self.path(SPACE)))?;
        self.check(SPACE, space.config_hash.as_deref())?;
        Ok(space)
    }

    pub fn load_holistic(&self) -> Result<HolisticPhraseSpace> {
        let vectors =
            verbsense::VectorSpace::read_tsv(self.open(HOLISTIC)?).map_err(|e| e.in_file(self.path(HOLISTIC)))?;
        self.check(HOLISTIC, vectors.config_hash.as_deref())?;
        Ok(HolisticPhraseSpace::from_vectors(vectors))
    }

    pub fn load_inventory(&self, verb: &str) -> Result<SenseInventory> {
        let rel = Self::senses_rel(verb);
        let reader = self.open(&rel)?;
        let inventory: SenseInventory =
            serde_json::from_reader(reader).map_err(|e| Error::from(e).in_file(self.path(&rel)))?;
        self.check(&rel, inventory.config_hash.as_deref())?;
        Ok(inventory)
    }

    fn load_matrix(&self, rel: &str) -> Result<VerbMatrix> {
        let vm = VerbMatrix::read_tsv(self.open(rel)?).map_err(|e| e.in_file(self.path(rel)))?;
        self.check(rel, vm.config_hash.as_deref())?;
        Ok(vm)
    }

    /// Ambiguous matrices of `verbs`; every missing file is named in the
    /// error.
    pub fn load_ambiguous(&self, verbs: &[String]) -> Result<BTreeMap<String, VerbMatrix>> {
        let mut out = BTreeMap::new();
        let mut missing = Vec::new();
        for verb in verbs {
            match self.load_matrix(&Self::ambiguous_rel(verb)) {
                Ok(vm) => {
                    out.insert(verb.clone(), vm);
                }
                Err(Error::MissingArtifact(rel)) => missing.push(rel),
                Err(e) => return Err(e),
            }
        }
        missing_error(missing).map(|()| out)
    }

    /// Inventories and per-sense matrices of `verbs`.
    pub fn load_senses(&self, verbs: &[String]) -> Result<BTreeMap<String, VerbSenses>> {
        let mut out = BTreeMap::new();
        let mut missing = Vec::new();
        for verb in verbs {
            let inventory = match self.load_inventory(verb) {
                Ok(inv) => inv,
                Err(Error::MissingArtifact(rel)) => {
                    missing.push(rel);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut matrices = BTreeMap::new();
            for sense in &inventory.senses {
                match self.load_matrix(&Self::sense_matrix_rel(verb, sense.id)) {
                    Ok(vm) => {
                        matrices.insert(sense.id, vm);
                    }
                    Err(Error::MissingArtifact(rel)) => missing.push(rel),
                    Err(e) => return Err(e),
                }
            }
            out.insert(verb.clone(), VerbSenses { inventory, matrices });
        }
        missing_error(missing).map(|()| out)
    }
}

fn missing_error(missing: Vec<String>) -> Result<()> {
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingArtifact(missing.join(", ")))
    }
}
