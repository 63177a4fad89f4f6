//! Unsupervised verb sense induction: context vectors of each verb
//! occurrence are clustered with Ward's agglomerative method, the cut with
//! the best variance ratio is kept, and objects are mapped to senses.

mod context;
mod hac;
mod inventory;
mod partition;

pub use context::{context_vector, ContextVector};
pub use hac::{dissimilarity, hac_cluster, Dendrogram, Merge};
pub use inventory::{assign_object, build_sense_inventory, Sense, SenseInventory};
pub use partition::{cut_dendrogram, select_partition, total_dispersion, variance_ratio, Partition};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base dissimilarity fed into the Ward update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    /// `1 − r`, Pearson correlation across vector components.
    Pearson,
    /// `1 − cos`.
    Cosine,
    /// Squared Euclidean distance, the classical input to Ward's method.
    Euclidean,
}

impl std::str::FromStr for Distance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pearson" => Ok(Distance::Pearson),
            "cosine" => Ok(Distance::Cosine),
            "euclidean" => Ok(Distance::Euclidean),
            other => Err(format!("unknown distance `{other}`")),
        }
    }
}

impl Distance {
    pub fn as_str(self) -> &'static str {
        match self {
            Distance::Pearson => "pearson",
            Distance::Cosine => "cosine",
            Distance::Euclidean => "euclidean",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub distance: Distance,
    pub k_min: usize,
    /// Upper bound on the number of senses; the search also stops at n − 1.
    pub k_max: usize,
    /// Senses with fewer objects are merged into the dominant sense.
    pub min_exemplars: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            distance: Distance::Pearson,
            k_min: 2,
            k_max: 10,
            min_exemplars: 3,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(Error::Config(format!(
                "cluster range must satisfy 2 <= k_min <= k_max (got {}..{})",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }
}
