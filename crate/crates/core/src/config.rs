//! The pipeline configuration file.
//!
//! A flat TOML document of dotted keys, e.g.
//!
//! ```toml
//! seed = 7
//! paths.corpus = "corpus.txt"
//! space.window = 5
//! regression.lambda = 1.0
//! cluster.distance = "pearson"
//! ```
//!
//! Unknown keys are rejected. Relative paths resolve against the directory
//! holding the file. Everything except `paths.*` feeds the config hash.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus_space::SpaceConfig;
use crate::error::{Error, Result};
use crate::holistic::HolisticConfig;
use crate::regression::RegressionConfig;
use crate::sense::ClusterConfig;
use crate::synth::SyntheticSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub relations: Option<PathBuf>,
    pub supervised_dataset: Option<PathBuf>,
    pub similarity_dataset: Option<PathBuf>,
    pub wordsim_dataset: Option<PathBuf>,
    pub artifacts: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            corpus: None,
            stoplist: None,
            relations: None,
            supervised_dataset: None,
            similarity_dataset: None,
            wordsim_dataset: None,
            artifacts: PathBuf::from("artifacts"),
        }
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.corpus,
            &mut self.stoplist,
            &mut self.relations,
            &mut self.supervised_dataset,
            &mut self.similarity_dataset,
            &mut self.wordsim_dataset,
        ]
        .into_iter()
        .flatten()
        {
            join(p);
        }
        join(&mut self.artifacts);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub folds: usize,
    pub permutations: usize,
    /// Inter-annotator agreement of the similarity dataset, if known.
    pub human_agreement: Option<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 4,
            permutations: crate::stats::DEFAULT_PERMUTATIONS,
            human_agreement: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: Paths,
    pub space: SpaceConfig,
    pub holistic: HolisticConfig,
    pub regression: RegressionConfig,
    pub cluster: ClusterConfig,
    pub eval: EvalConfig,
    pub synth: SyntheticSpec,
}

/// The result-affecting part of a config, in a fixed field order.
#[derive(Serialize)]
struct Hashed<'a> {
    seed: u64,
    space: &'a SpaceConfig,
    holistic: &'a HolisticConfig,
    regression: &'a RegressionConfig,
    cluster: &'a ClusterConfig,
    eval: &'a EvalConfig,
    synth: &'a SyntheticSpec,
}

impl PipelineConfig {
    /// Parses config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.paths.resolve(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        self.regression.validate()?;
        self.cluster.validate()?;
        if self.holistic.window == 0 || self.holistic.svd_dim == 0 || self.holistic.min_phrase_count == 0 {
            return Err(Error::Config(
                "holistic window, svd_dim and min_phrase_count must be positive".into(),
            ));
        }
        if self.eval.folds < 2 {
            return Err(Error::Config("eval.folds must be at least 2".into()));
        }
        if self.eval.permutations == 0 {
            return Err(Error::Config("eval.permutations must be positive".into()));
        }
        Ok(())
    }

    /// Regression settings with the global seed applied.
    pub fn regression(&self) -> RegressionConfig {
        RegressionConfig {
            seed: self.seed,
            ..self.regression.clone()
        }
    }

    /// SHA-256 over every setting that can change a result; paths are left
    /// out so that moving a project does not invalidate its artifacts.
    pub fn hash(&self) -> String {
        let hashed = Hashed {
            seed: self.seed,
            space: &self.space,
            holistic: &self.holistic,
            regression: &self.regression,
            cluster: &self.cluster,
            eval: &self.eval,
            synth: &self.synth,
        };
        let canonical = serde_json::to_string(&hashed).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Renders the config back to the file format, with every key explicit.
    pub fn to_toml(&self) -> Result<String> {
        let table = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut lines = Vec::new();
        flatten("", &table, &mut lines);
        Ok(lines.join(""))
    }

    /// Settings suited to a generated synthetic corpus: every content word
    /// is a basis word and every planted phrase clears the phrase threshold.
    pub fn for_synthetic(spec: &SyntheticSpec) -> Self {
        let mut cfg = PipelineConfig {
            seed: spec.seed,
            synth: spec.clone(),
            ..PipelineConfig::default()
        };
        cfg.space.top_exclusions = 0;
        cfg.space.min_occurrences = (spec.phrase_occurrences as u64 / 2).max(1);
        cfg.space.svd_dim = 40;
        cfg.holistic.min_phrase_count = spec.phrase_occurrences;
        cfg.holistic.svd_dim = 40;
        cfg.paths = Paths {
            corpus: Some(crate::synth::files::CORPUS.into()),
            stoplist: Some(crate::synth::files::STOPLIST.into()),
            relations: Some(crate::synth::files::RELATIONS.into()),
            supervised_dataset: Some(crate::synth::files::SUPERVISED.into()),
            similarity_dataset: Some(crate::synth::files::SIMILARITY.into()),
            wordsim_dataset: None,
            artifacts: "artifacts".into(),
        };
        cfg
    }
}

/// One `dotted.key = value` line per leaf. The regression initializer is a
/// tagged value and stays inline.
fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<String>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) if key != "regression.init" => flatten(&key, t, out),
            other => out.push(format!("{key} = {other}\n")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::Init;
    use crate::sense::Distance;

    #[test]
    fn defaults_match_the_reference_setup() {
        let cfg = PipelineConfig::parse("", Path::new("/p")).unwrap();
        assert_eq!(cfg.space.window, 5);
        assert_eq!(cfg.space.basis_size, 2000);
        assert_eq!(cfg.space.top_exclusions, 50);
        assert_eq!(cfg.space.svd_dim, 300);
        assert_eq!(cfg.holistic.min_phrase_count, 100);
        assert_eq!(cfg.eval.folds, 4);
        assert_eq!(cfg.cluster.min_exemplars, 3);
        assert_eq!(cfg.paths.artifacts, PathBuf::from("/p/artifacts"));
    }

    #[test]
    fn dotted_keys() {
        let text = r#"
            # comment
            seed = 9
            paths.corpus = "data/c.txt"
            space.window = 3
            regression.lambda = 0.5
            regression.init = { gaussian = { sigma = 0.01 } }
            regression.mode = "stochastic"
            cluster.distance = "cosine"
            eval.human_agreement = 0.55
        "#;
        let cfg = PipelineConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.paths.corpus, Some(PathBuf::from("/base/data/c.txt")));
        assert_eq!(cfg.space.window, 3);
        assert_eq!(cfg.regression.lambda, 0.5);
        assert_eq!(cfg.regression.init, Init::Gaussian { sigma: 0.01 });
        assert_eq!(cfg.regression().seed, 9);
        assert_eq!(cfg.cluster.distance, Distance::Cosine);
        assert_eq!(cfg.eval.human_agreement, Some(0.55));
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        for text in [
            "space.windw = 3",
            "bogus = 1",
            "space.svd_dim = 5000",
            "regression.learning_rate = 0.0",
            "cluster.k_min = 1",
            "eval.folds = 1",
            "space.window = \"five\"",
        ] {
            assert!(
                matches!(PipelineConfig::parse(text, Path::new(".")), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn hash_tracks_settings_not_paths() {
        let a = PipelineConfig::parse("paths.corpus = \"a\"", Path::new(".")).unwrap();
        let b = PipelineConfig::parse("paths.corpus = \"b\"", Path::new(".")).unwrap();
        let c = PipelineConfig::parse("space.window = 4", Path::new(".")).unwrap();
        let d = PipelineConfig::parse("seed = 1", Path::new(".")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_ne!(a.hash(), d.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn render_round_trip() {
        let mut cfg = PipelineConfig::for_synthetic(&SyntheticSpec::default());
        cfg.regression.init = Init::Gaussian { sigma: 0.02 };
        let text = cfg.to_toml().unwrap();
        assert!(text.contains("space.window = 5"), "{text}");
        let back = PipelineConfig::parse(&text, Path::new("")).unwrap();
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(back.paths.corpus, cfg.paths.corpus);
    }
}
