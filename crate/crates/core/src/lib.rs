//! Compositional phrase vectors from regression-trained verb matrices, with
//! unsupervised verb sense induction ahead of composition.
//!
//! The pipeline: a word space from windowed co-occurrence counts
//! ([`corpus_space`]), holistic verb–object phrase vectors ([`holistic`]),
//! ridge-regression verb matrices mapping object vectors into phrase space
//! ([`regression`]), verb sense clusters ([`sense`]), composition under the
//! compared models ([`composition`]) and the two evaluation protocols
//! ([`eval`]).

pub mod composition;
pub mod config;
pub mod corpus;
pub mod corpus_space;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod holistic;
pub mod linalg;
pub mod regression;
pub mod sense;
pub mod stats;
pub mod synth;
pub mod vectors;

pub use nalgebra::{DMatrix, DVector};

pub use config::PipelineConfig;
pub use corpus::{Corpus, Pos, StopList, Token, WordKey};
pub use corpus_space::{SemanticSpace, SpaceConfig};
pub use error::{Error, Result};
pub use holistic::{HolisticPhraseSpace, PhraseKey};
pub use regression::{RegressionConfig, TrainingSet, VerbMatrix};
pub use sense::{ClusterConfig, SenseInventory};
pub use vectors::{Provenance, VectorSpace};
